#pragma once

// JSON interchange for the domain types and the CSV/binary file formats used
// by the command-line tool. All text output uses round-trip precision.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "forecast.hpp"
#include "json.hpp"
#include "synth.hpp"
#include "validate.hpp"

namespace mesa::io {

using nlohmann::json;

/// I/O or parse failure (maps to the usage/I-O exit code).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

/// Write via a temporary sibling and rename, so readers never observe a
/// truncated file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace detail {

inline json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

inline double null_to_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

// Splits on commas, semicolons, tabs or spaces; empty fields are dropped.
inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ';' || ch == '\t' || ch == ' ' || ch == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::optional<double> parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// Numeric rows of a CSV; a non-numeric first row is treated as a header.
inline std::vector<std::vector<double>> read_numeric_rows(const std::string& text,
                                                          const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    for (const auto& f : fields) {
      auto v = parse_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw IoError(name + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(name + ":" + std::to_string(lineno) + ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(name + ": no numeric rows");
  return rows;
}

}  // namespace detail

// ---- time series ----------------------------------------------------------

/// Single-column CSV of samples (needs `dt`), or two-column "time,value" with
/// uniform spacing checked to 1e-9 relative. An explicit `dt` must agree with
/// the time column.
inline TimeSeries read_series_csv(const std::filesystem::path& path,
                                  std::optional<double> dt = std::nullopt) {
  const auto rows = detail::read_numeric_rows(read_file(path), path.string());
  const std::size_t cols = rows.front().size();
  std::vector<double> x;
  x.reserve(rows.size());
  if (cols == 1) {
    if (!dt) throw IoError(path.string() + ": single-column input needs --dt");
    for (const auto& r : rows) x.push_back(r[0]);
    return TimeSeries(std::move(x), *dt);
  }
  if (cols != 2) throw IoError(path.string() + ": expected 1 or 2 columns");
  if (rows.size() < 2) throw IoError(path.string() + ": need at least two samples");
  const double step = (rows.back()[0] - rows.front()[0]) / static_cast<double>(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = rows[i][0] - rows[i - 1][0];
    if (std::abs(d - step) > 1e-9 * std::abs(step))
      throw IoError(path.string() + ": time column is not uniformly spaced at row " +
                    std::to_string(i + 1));
  }
  if (dt && std::abs(*dt - step) > 1e-9 * std::abs(step))
    throw IoError(path.string() + ": --dt disagrees with the time column");
  for (const auto& r : rows) x.push_back(r[1]);
  return TimeSeries(std::move(x), step);
}

/// Raw little-endian float64 samples.
inline TimeSeries read_series_binary(const std::filesystem::path& path, double dt) {
  const std::string bytes = read_file(path);
  if (bytes.size() % 8 != 0) throw IoError(path.string() + ": size is not a multiple of 8");
  std::vector<double> x(bytes.size() / 8);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 7; b >= 0; --b)
      u = (u << 8) | static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(b)]);
    std::memcpy(&x[i], &u, sizeof u);
  }
  return TimeSeries(std::move(x), dt);
}

inline std::string series_csv(const TimeSeries& ts) {
  std::string out = "time,value\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    out += format_double(static_cast<double>(i) * ts.dt()) + "," +
           format_double(ts.values()[i]) + "\n";
  return out;
}

// ---- spectra --------------------------------------------------------------

inline std::string psd_csv(const SpectralDensity& sd) {
  std::string out = "frequency_hz,psd\n";
  for (std::size_t i = 0; i < sd.size(); ++i)
    out += format_double(sd.freqs()[i]) + "," + format_double(sd.values()[i]) + "\n";
  return out;
}

inline TabulatedPsd read_tabulated_psd(const std::filesystem::path& path,
                                       Interpolation interp = Interpolation::linear) {
  const auto rows = detail::read_numeric_rows(read_file(path), path.string());
  if (rows.front().size() != 2)
    throw IoError(path.string() + ": expected two columns frequency_hz,psd");
  std::vector<double> f, v;
  for (const auto& r : rows) {
    f.push_back(r[0]);
    v.push_back(r[1]);
  }
  return TabulatedPsd(std::move(f), std::move(v), interp);
}

// ---- forecasts ------------------------------------------------------------

inline std::string quantile_column_name(double q) {
  const double pct = q * 100.0;
  std::ostringstream os;
  if (std::abs(pct - std::round(pct)) < 1e-9) {
    os << 'q' << std::setw(2) << std::setfill('0') << static_cast<long>(std::round(pct));
  } else {
    os << 'q' << std::setprecision(6) << pct;
  }
  return os.str();
}

/// "step,median,qNN,..." with one row per horizon step (steps start at 1).
inline std::string forecast_csv(const QuantileTable& table) {
  std::string out = "step,median";
  for (double q : table.quantiles) out += "," + quantile_column_name(q);
  out += "\n";
  for (std::size_t h = 0; h < table.median.size(); ++h) {
    out += std::to_string(h + 1) + "," + format_double(table.median[h]);
    for (double v : table.values[h]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

// ---- experiment records ---------------------------------------------------

inline json to_json(const RealizationRecord& r) {
  return {{"index", r.index}, {"order", r.order}, {"error", r.error}};
}

inline json to_json(const OrderRecoveryRecord& r) {
  json j{{"index", r.index}, {"p_true", r.p_true}, {"m_max", r.m_max}};
  for (std::size_t k = 0; k < kAllCriteria.size(); ++k)
    j["p_hat_" + std::string(to_string(kAllCriteria[k]))] = r.p_hat[k];
  return j;
}

template <typename Record>
std::string json_lines(const std::vector<Record>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

}  // namespace mesa::io

// ---- nlohmann serializers for the domain types ------------------------------

namespace nlohmann {

template <>
struct adl_serializer<mesa::TimeSeries> {
  static void to_json(json& j, const mesa::TimeSeries& ts) {
    j = {{"samples", ts.values()}, {"dt", ts.dt()}};
  }
  static mesa::TimeSeries from_json(const json& j) {
    return {j.at("samples").get<std::vector<double>>(), j.at("dt").get<double>()};
  }
};

template <>
struct adl_serializer<mesa::ArModel> {
  static void to_json(json& j, const mesa::ArModel& m) {
    j = {{"a", m.a()}, {"p_m", m.p_m()}, {"dt", m.dt()}};
  }
  static mesa::ArModel from_json(const json& j) {
    return {j.at("a").get<std::vector<double>>(), j.at("p_m").get<double>(),
            j.at("dt").get<double>()};
  }
};

template <>
struct adl_serializer<mesa::SpectralDensity> {
  static void to_json(json& j, const mesa::SpectralDensity& sd) {
    j = {{"freqs", sd.freqs()},
         {"values", sd.values()},
         {"sided", std::string(mesa::to_string(sd.sided()))},
         {"dt", sd.dt()}};
  }
  static mesa::SpectralDensity from_json(const json& j) {
    return {j.at("freqs").get<std::vector<double>>(), j.at("values").get<std::vector<double>>(),
            mesa::parse_sided(j.at("sided").get<std::string>()), j.at("dt").get<double>()};
  }
};

template <>
struct adl_serializer<mesa::OrderSelection> {
  static void to_json(json& j, const mesa::OrderSelection& s) {
    json losses = json::array();
    for (double v : s.losses()) losses.push_back(mesa::io::detail::nan_to_null(v));
    j = {{"criterion", std::string(mesa::to_string(s.criterion()))},
         {"losses", std::move(losses)},
         {"chosen_order", s.chosen_order()},
         {"early_stopped", s.early_stopped()}};
  }
  static mesa::OrderSelection from_json(const json& j) {
    std::vector<double> losses;
    for (const auto& v : j.at("losses")) losses.push_back(mesa::io::detail::null_to_nan(v));
    return {mesa::parse_criterion(j.at("criterion").get<std::string>()), std::move(losses),
            j.at("chosen_order").get<std::size_t>(), j.value("early_stopped", false)};
  }
};

template <>
struct adl_serializer<mesa::RecursionTrace> {
  static void to_json(json& j, const mesa::RecursionTrace& t) {
    j = {{"p", t.p()},
         {"c", t.c()},
         {"coeffs", t.stored_coefficients()},
         {"all_orders", t.all_orders_retained()}};
  }
  static mesa::RecursionTrace from_json(const json& j) {
    return {j.at("p").get<std::vector<double>>(), j.at("c").get<std::vector<double>>(),
            j.at("coeffs").get<std::vector<std::vector<double>>>(),
            j.at("all_orders").get<bool>()};
  }
};

template <>
struct adl_serializer<mesa::ForecastEnsemble> {
  static void to_json(json& j, const mesa::ForecastEnsemble& e) {
    j = {{"realizations", e.realizations()},
         {"seed_length", e.seed_length()},
         {"model", e.model()}};
  }
  static mesa::ForecastEnsemble from_json(const json& j) {
    return {j.at("realizations").get<std::vector<std::vector<double>>>(),
            j.at("seed_length").get<std::size_t>(), j.at("model").get<mesa::ArModel>()};
  }
};

}  // namespace nlohmann
