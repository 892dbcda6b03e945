/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <irlw/grid.hpp>
#include <irlw/learned.hpp>
#include <irlw/solver.hpp>

namespace irlw {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

/// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// PGM (binary P5, 8-bit) images
// ---------------------------------------------------------------------------

/// Read an 8-bit binary PGM; intensities are scaled to [0, 1].
inline RealGrid read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5")
    throw IoError("not a binary PGM (P5) file: " + path.string());
  const auto next_token = [&]() -> long {
    // header tokens may be separated by whitespace and '#' comments
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = -1;
    in >> v;
    return v;
  };
  const long width = next_token();
  const long height = next_token();
  const long maxval = next_token();
  if (!in || width <= 0 || height <= 0)
    throw IoError("malformed PGM header in " + path.string());
  if (maxval != 255)
    throw IoError("unsupported PGM maxval (want 255) in " + path.string());
  in.get();  // single whitespace after maxval
  std::vector<unsigned char> bytes(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!in) throw IoError("truncated PGM payload in " + path.string());
  RealGrid g(static_cast<std::size_t>(height), static_cast<std::size_t>(width));
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c)
      g(r, c) = bytes[r * g.cols() + c] / 255.0;
  return g;
}

/// Write an 8-bit binary PGM; values are clamped to [0, 1].
inline void write_pgm(const std::filesystem::path& path, const RealGrid& g) {
  if (g.empty()) throw DimensionError("write_pgm: empty grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image " + path.string());
  out << "P5\n" << g.cols() << " " << g.rows() << "\n255\n";
  std::vector<unsigned char> bytes(g.size());
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c) {
      const double v = std::min(1.0, std::max(0.0, g(r, c)));
      bytes[r * g.cols() + c] = static_cast<unsigned char>(v * 255.0 + 0.5);
    }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing image " + path.string());
}

/// Write a PGM with the grid range mapped to the full gray scale.
inline void write_pgm_normalized(const std::filesystem::path& path,
                                 const RealGrid& g) {
  double lo = g[0], hi = g[0];
  for (double x : g.data()) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double span = hi - lo;
  RealGrid scaled(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i)
    scaled[i] = span > 0.0 ? (g[i] - lo) / span : 0.0;
  write_pgm(path, scaled);
}

// ---------------------------------------------------------------------------
// Sinogram CSV: header `s_index,theta_degrees,value`, all s for theta_0,
// then theta_1, ... (the column-major vectorization order).
// ---------------------------------------------------------------------------

inline void write_sinogram_csv(const std::filesystem::path& path,
                               const RealGrid& sino,
                               const std::vector<double>& angles_radians) {
  if (sino.cols() != angles_radians.size())
    throw DimensionError("write_sinogram_csv: angle count mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write sinogram " + path.string());
  out << "s_index,theta_degrees,value\n";
  for (std::size_t a = 0; a < sino.cols(); ++a) {
    const double deg = angles_radians[a] * 180.0 / std::numbers::pi;
    for (std::size_t s = 0; s < sino.rows(); ++s)
      out << s << "," << format_double(deg) << ","
          << format_double(sino(s, a)) << "\n";
  }
  if (!out) throw IoError("failed writing sinogram " + path.string());
}

struct SinogramCsv {
  RealGrid values;  // bins x angles
  std::vector<double> theta_degrees;
};

inline SinogramCsv read_sinogram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sinogram " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "s_index,theta_degrees,value")
    throw IoError("bad sinogram CSV header in " + path.string());
  std::vector<std::size_t> s_indices;
  std::vector<double> thetas_per_row, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string s_str, t_str, v_str;
    if (!std::getline(row, s_str, ',') || !std::getline(row, t_str, ',') ||
        !std::getline(row, v_str))
      throw IoError("malformed sinogram row in " + path.string());
    s_indices.push_back(std::stoul(s_str));
    thetas_per_row.push_back(std::stod(t_str));
    values.push_back(std::stod(v_str));
  }
  if (values.empty()) throw IoError("empty sinogram CSV " + path.string());
  // bins = length of the first angle block (second occurrence of s == 0)
  std::size_t bins = values.size();
  for (std::size_t i = 1; i < s_indices.size(); ++i)
    if (s_indices[i] == 0) {
      bins = i;
      break;
    }
  if (values.size() % bins != 0)
    throw IoError("ragged sinogram CSV " + path.string());
  const std::size_t n_angles = values.size() / bins;
  std::vector<double> thetas(n_angles);
  for (std::size_t a = 0; a < n_angles; ++a) {
    thetas[a] = thetas_per_row[a * bins];
    for (std::size_t s = 0; s < bins; ++s) {
      const std::size_t i = a * bins + s;
      if (s_indices[i] != s || thetas_per_row[i] != thetas[a])
        throw IoError("sinogram rows out of order in " + path.string());
    }
  }
  return {RealGrid::from_data(bins, n_angles, std::move(values)),
          std::move(thetas)};
}

// ---------------------------------------------------------------------------
// Trace CSV: header `k,residual_F,residual_A,lambda_k,error_to_truth`,
// absent values empty, final summary line `#stop,<reason>,<k*>`.
// ---------------------------------------------------------------------------

inline void write_trace_csv(const std::filesystem::path& path,
                            const IterationTrace& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace " + path.string());
  out << "k,residual_F,residual_A,lambda_k,error_to_truth\n";
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& rec : trace.records)
    out << rec.k << "," << format_double(rec.residual_F) << ","
        << opt(rec.residual_A) << "," << opt(rec.lambda_k) << ","
        << opt(rec.error_to_truth) << "\n";
  out << "#stop," << to_string(trace.stop_reason) << ","
      << trace.stop_index() << "\n";
  if (!out) throw IoError("failed writing trace " + path.string());
}

/// Parse a trace CSV back into records (the final iterate is not part of
/// the CSV format and comes back empty).
inline IterationTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "k,residual_F,residual_A,lambda_k,error_to_truth")
    throw IoError("bad trace CSV header in " + path.string());
  IterationTrace trace;
  bool saw_stop = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    if (line.rfind("#stop,", 0) == 0) {
      std::getline(row, field, ',');  // "#stop"
      std::string reason, kstar;
      std::getline(row, reason, ',');
      std::getline(row, kstar);
      if (reason == "discrepancy")
        trace.stop_reason = StopReason::discrepancy;
      else if (reason == "max_iterations")
        trace.stop_reason = StopReason::max_iterations;
      else
        throw IoError("unknown stop reason '" + reason + "' in " +
                      path.string());
      if (std::stoul(kstar) != trace.records.size())
        throw IoError("stop index does not match record count in " +
                      path.string());
      saw_stop = true;
      continue;
    }
    TraceRecord rec;
    std::getline(row, field, ',');
    rec.k = std::stoul(field);
    std::getline(row, field, ',');
    rec.residual_F = std::stod(field);
    const auto opt = [&](std::optional<double>& v) {
      if (!std::getline(row, field, ',')) field.clear();
      if (!field.empty()) v = std::stod(field);
    };
    opt(rec.residual_A);
    opt(rec.lambda_k);
    opt(rec.error_to_truth);
    trace.records.push_back(rec);
  }
  if (!saw_stop) throw IoError("trace CSV lacks #stop line: " + path.string());
  return trace;
}

// ---------------------------------------------------------------------------
// Metrics: flat `key=value` text, one entry per line, insertion order.
// ---------------------------------------------------------------------------

using Metrics = std::vector<std::pair<std::string, std::string>>;

inline void write_metrics(const std::filesystem::path& path,
                          const Metrics& metrics) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics " + path.string());
  for (const auto& [key, value] : metrics) out << key << "=" << value << "\n";
  if (!out) throw IoError("failed writing metrics " + path.string());
}

// ---------------------------------------------------------------------------
// Training manifest: one `input_path,output_path` line per pair; relative
// paths are resolved against the manifest's directory.
// ---------------------------------------------------------------------------

inline std::vector<std::pair<std::filesystem::path, std::filesystem::path>>
read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const auto base = path.parent_path();
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError("manifest line lacks a comma: " + line);
    pairs.emplace_back(resolve(line.substr(0, comma)),
                       resolve(line.substr(comma + 1)));
  }
  if (pairs.empty()) throw IoError("manifest is empty: " + path.string());
  return pairs;
}

// ---------------------------------------------------------------------------
// Serialized learned operator: magic "IRLA", version, form, dimensions,
// truncation tolerance, then the little-endian f64 blocks -- Y and U+ for
// the factored form or A for the explicit form (column-major).
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void put_block(std::ostream& out, const Eigen::MatrixXd& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

inline std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
inline std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
inline double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
inline Eigen::MatrixXd get_block(std::istream& in, std::uint64_t rows,
                                 std::uint64_t cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  return m;
}

}  // namespace detail

inline constexpr std::uint32_t kOperatorFormatVersion = 1;

/// Write the operator container; `as_explicit` forces the explicit M x N
/// block (materialized from the factors when necessary), the default keeps
/// the factored form whenever the operator carries it.
inline void save_learned_operator(const std::filesystem::path& path,
                                  const LearnedOperator& op,
                                  bool as_explicit = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write operator " + path.string());
  const bool factored = op.has_factors() && !as_explicit;
  out.write("IRLA", 4);
  detail::put_u32(out, kOperatorFormatVersion);
  detail::put_u32(out, factored ? 0 : 1);
  detail::put_u64(out, op.range_shape().size());
  detail::put_u64(out, op.domain_shape().size());
  detail::put_u64(out, op.n_pairs());
  detail::put_u64(out, op.domain_shape().rows);
  detail::put_u64(out, op.domain_shape().cols);
  detail::put_u64(out, op.range_shape().rows);
  detail::put_u64(out, op.range_shape().cols);
  detail::put_f64(out, op.truncation_tolerance());
  if (factored) {
    detail::put_block(out, op.output_factor());
    detail::put_block(out, op.pinv_factor());
  } else if (op.has_explicit_matrix()) {
    detail::put_block(out, op.explicit_matrix());
  } else {
    const Eigen::MatrixXd A = op.output_factor() * op.pinv_factor();
    detail::put_block(out, A);
  }
  if (!out) throw IoError("failed writing operator " + path.string());
}

inline LearnedOperator load_learned_operator(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open operator " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "IRLA", 4) != 0)
    throw IoError("bad operator magic in " + path.string());
  const std::uint32_t version = detail::get_u32(in);
  if (version != kOperatorFormatVersion)
    throw IoError("unsupported operator version in " + path.string());
  const std::uint32_t form = detail::get_u32(in);
  const std::uint64_t M = detail::get_u64(in);
  const std::uint64_t N = detail::get_u64(in);
  const std::uint64_t n_pairs = detail::get_u64(in);
  const Shape in_shape{detail::get_u64(in), detail::get_u64(in)};
  const Shape out_shape{detail::get_u64(in), detail::get_u64(in)};
  const double tol = detail::get_f64(in);
  if (in_shape.size() != N || out_shape.size() != M)
    throw IoError("inconsistent operator dimensions in " + path.string());
  if (form == 0) {
    Eigen::MatrixXd Y = detail::get_block(in, M, n_pairs);
    Eigen::MatrixXd pinv_U = detail::get_block(in, n_pairs, N);
    if (!in) throw IoError("truncated operator payload in " + path.string());
    return LearnedOperator(in_shape, out_shape, std::move(Y),
                           std::move(pinv_U), {}, tol);
  }
  if (form == 1) {
    Eigen::MatrixXd A = detail::get_block(in, M, N);
    if (!in) throw IoError("truncated operator payload in " + path.string());
    return LearnedOperator::from_explicit(in_shape, out_shape, std::move(A),
                                          n_pairs, tol);
  }
  throw IoError("unknown operator form in " + path.string());
}

}  // namespace irlw
