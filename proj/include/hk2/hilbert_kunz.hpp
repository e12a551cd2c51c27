#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hk2/colength.hpp"
#include "hk2/dyadic.hpp"
#include "hk2/error.hpp"
#include "hk2/parallel.hpp"
#include "hk2/poly2.hpp"

namespace hk2 {

// One persisted Hilbert-Kunz value: e_n(f^i) for the polynomial behind
// poly_key.
struct HKRecord {
  std::string poly_key;
  std::uint64_t power = 1;
  unsigned level = 0;
  std::uint64_t value = 0;
};

// Append-only store for colength results.  File format, one record per line:
//
//   poly_key,i,n,value
//
// Values never change once stored: a conflicting store or load proves a
// computation bug and is a fatal error, because a silently wrong entry would
// poison every series built on top of it.
class HKCache {
 public:
  HKCache() = default;

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return map_.size();
  }

  std::optional<std::uint64_t> lookup(const std::string& key, std::uint64_t i, unsigned n) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = map_.find(Key{key, i, n});
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void store(const HKRecord& rec) {
    std::lock_guard<std::mutex> lock(mu_);
    store_locked(rec, "store");
  }

  // Merges records from `file` (missing file is an empty merge).  Corrupt
  // lines are skipped and reported through load_warnings(); a value conflict
  // is fatal.  Returns the number of records merged.
  std::size_t load_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) return 0;
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t merged = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      HKRecord rec;
      std::string why;
      if (!parse_line(line, rec, why)) {
        warnings_.push_back(file.string() + ":" + std::to_string(line_no) + ": skipped: " + why);
        continue;
      }
      store_locked(rec, file.string() + ":" + std::to_string(line_no));
      ++merged;
    }
    return merged;
  }

  // Atomic rewrite: temporary file in the same directory, then rename.
  void save_file(const std::filesystem::path& file) const {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    const std::filesystem::path tmp = file.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
      std::lock_guard<std::mutex> lock(mu_);
      for (const auto& [key, value] : map_)
        out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
            << value << '\n';
    }
    std::filesystem::rename(tmp, file);
  }

  const std::vector<std::string>& load_warnings() const { return warnings_; }

  std::vector<HKRecord> records() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<HKRecord> out;
    out.reserve(map_.size());
    for (const auto& [key, value] : map_)
      out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), value});
    return out;
  }

 private:
  using Key = std::tuple<std::string, std::uint64_t, unsigned>;

  void store_locked(const HKRecord& rec, const std::string& origin) {
    const auto [it, inserted] = map_.emplace(Key{rec.poly_key, rec.power, rec.level}, rec.value);
    if (!inserted && it->second != rec.value)
      throw cache_conflict_error("cache conflict at " + origin + " for (" + rec.poly_key + "," +
                                 std::to_string(rec.power) + "," + std::to_string(rec.level) +
                                 "): stored " + std::to_string(it->second) + ", new " +
                                 std::to_string(rec.value));
  }

  static bool parse_uint(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s.size() > 20) return false;
    out = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return false;
      out = out * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return true;
  }

  static bool parse_line(const std::string& line, HKRecord& rec, std::string& why) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 4) {
      why = "expected 4 comma-separated fields, got " + std::to_string(fields.size());
      return false;
    }
    if (fields[0].empty()) {
      why = "empty poly key";
      return false;
    }
    std::uint64_t i = 0, n = 0, v = 0;
    if (!parse_uint(fields[1], i) || !parse_uint(fields[2], n) || !parse_uint(fields[3], v)) {
      why = "non-numeric field";
      return false;
    }
    if (n > 62) {
      why = "level out of range";
      return false;
    }
    // colengths satisfy value <= q^r; the key prefix carries r
    const std::size_t bar = fields[0].find('|');
    if (bar != std::string::npos) {
      std::size_t r = 1;
      for (std::size_t k = 0; k < bar; ++k)
        if (fields[0][k] == ';') ++r;
      if (n * r < 64 && v > (std::uint64_t{1} << (n * r))) {
        why = "value exceeds q^r";
        return false;
      }
    }
    rec = {fields[0], i, static_cast<unsigned>(n), v};
    return true;
  }

  mutable std::mutex mu_;
  std::map<Key, std::uint64_t> map_;
  std::vector<std::string> warnings_;
};

struct HKOptions {
  std::uint64_t size_limit = kDefaultSizeLimit;
  unsigned threads = 1;
  HKCache* cache = nullptr;
};

// e_n(f^i), through the cache when one is attached.
inline std::uint64_t hk_value(const Poly2& f, std::uint64_t i, unsigned n,
                              const HKOptions& opt = {}) {
  std::string key;
  if (opt.cache) {
    key = f.cache_key();
    if (const auto hit = opt.cache->lookup(key, i, n)) return *hit;
  }
  const std::uint64_t v =
      colength(f.pow(i), QuotientSpec::at_level(f.var_count(), n), opt.size_limit);
  if (opt.cache) opt.cache->store({key, i, n, v});
  return v;
}

// phi_f sampled at level n: value at i/q is e_n(f^i)/q^r.  The q+1 colength
// jobs are independent and run as a parallel map.
inline PhiSample phi_sample(const Poly2& f, unsigned n, const HKOptions& opt = {}) {
  if (f.has_constant_term())
    throw precondition_error("phi_sample needs a polynomial without constant term");
  if (n >= 63) throw size_limit_error("level too large: instance too large");
  const std::uint64_t q = std::uint64_t{1} << n;
  const Int qr = int_pow2(static_cast<unsigned long>(n) * f.var_count());
  std::vector<Rat> vals(q + 1);
  parallel_for(q + 1, opt.threads, [&](std::size_t i) {
    const std::uint64_t e = hk_value(f, i, n, opt);
    vals[i] = make_rat(Int(static_cast<unsigned long>(e)), qr);
  });
  return make_x_element(n, std::move(vals));
}

}  // namespace hk2
