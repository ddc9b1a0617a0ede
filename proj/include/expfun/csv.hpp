#pragma once

// Plot-ready CSV artifacts.  Floats carry 17 significant digits so files
// round-trip exactly; writes go through a temp file + rename so readers never
// see a partial file.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "expfun/pide.hpp"
#include "expfun/stationary.hpp"

namespace expfun::csv {

inline std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

// single-column sample file
inline void write_samples(const std::string& path, const Array& v,
                          const std::string& header = "I_t") {
  std::string s = header + "\n";
  for (Index i = 0; i < v.size(); ++i) s += fmt(v[i]) + "\n";
  atomic_write(path, s);
}

inline void write_xy(const std::string& path, const std::string& header, const Array& x,
                     const Array& y) {
  if (x.size() != y.size()) throw std::invalid_argument("write_xy: column length mismatch");
  std::string s = header + "\n";
  for (Index i = 0; i < x.size(); ++i) s += fmt(x[i]) + "," + fmt(y[i]) + "\n";
  atomic_write(path, s);
}

// long format, one row per (slice, node)
inline void write_density_field(const std::string& path, const DensityField& f) {
  std::string s = "s,y,p\n";
  for (Index i = 0; i < f.times.size(); ++i)
    for (Index j = 0; j < f.y.size(); ++j)
      s += fmt(f.times[i]) + "," + fmt(f.y[j]) + "," + fmt(f.p(i, j)) + "\n";
  atomic_write(path, s);
}

inline void write_cdf_field(const std::string& path, const CdfField& f) {
  std::string s = "s,y,F\n";
  for (Index i = 0; i < f.times.size(); ++i)
    for (Index j = 0; j < f.y.size(); ++j)
      s += fmt(f.times[i]) + "," + fmt(f.y[j]) + "," + fmt(f.F(i, j)) + "\n";
  atomic_write(path, s);
}

inline void write_stationary(const std::string& path, const StationarySolution& sol) {
  std::string s = "y,p_inf,F_inf\n";
  for (Index j = 0; j < sol.y.size(); ++j)
    s += fmt(sol.y[j]) + "," + fmt(sol.p_inf[j]) + "," + fmt(sol.F_inf[j]) + "\n";
  atomic_write(path, s);
}

}  // namespace expfun::csv
