#include "lisa/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lisa::io {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("parse_double: bad number '" +
                                std::string(s) + "'");
  return v;
}

uint64_t parse_u64(std::string_view s) {
  uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("parse_u64: bad integer '" + std::string(s) +
                                "'");
  return v;
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

int dimension_from_header(const std::vector<std::string_view>& cols,
                          std::size_t first_x) {
  int dim = 0;
  while (first_x + static_cast<std::size_t>(dim) < cols.size() &&
         cols[first_x + static_cast<std::size_t>(dim)].size() == 2 &&
         cols[first_x + static_cast<std::size_t>(dim)][0] == 'x')
    ++dim;
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("csv: malformed coordinate header");
  return dim;
}

}  // namespace

void write_steps_csv(std::ostream& os, const Trace& trace) {
  if (trace.steps > 0 && trace.records.empty())
    throw std::runtime_error("write_steps_csv: trace was run without records");
  const int dim = trace.config.dimension();
  os << "n,chi,d";
  for (int a = 0; a < dim; ++a) os << ",x" << (a + 1);
  os << ",dstar,m,M\n";
  for (const auto& r : trace.records) {
    os << r.n << ',' << r.chi << ',' << format_double(r.d);
    for (int a = 0; a < dim; ++a) os << ',' << format_double(r.x_new[a]);
    os << ',' << format_double(r.dstar) << ',' << format_double(r.m) << ','
       << format_double(r.M) << '\n';
  }
}

StepTable read_steps_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("read_steps_csv: missing header");
  auto cols = split_csv(line);
  if (cols.size() < 7 || cols[0] != "n" || cols[1] != "chi" || cols[2] != "d")
    throw std::invalid_argument("read_steps_csv: bad header '" + line + "'");
  StepTable table;
  table.dimension = dimension_from_header(cols, 3);
  const std::size_t expect = 6 + static_cast<std::size_t>(table.dimension);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    cols = split_csv(line);
    if (cols.size() != expect)
      throw std::invalid_argument("read_steps_csv: line " +
                                  std::to_string(lineno) + ": expected " +
                                  std::to_string(expect) + " fields");
    StepRow row;
    row.n = parse_u64(cols[0]);
    row.chi = parse_u64(cols[1]);
    row.d = parse_double(cols[2]);
    for (int a = 0; a < table.dimension; ++a)
      row.x_new[static_cast<std::size_t>(a)] =
          parse_double(cols[3 + static_cast<std::size_t>(a)]);
    const std::size_t base = 3 + static_cast<std::size_t>(table.dimension);
    row.dstar = parse_double(cols[base]);
    row.m = parse_double(cols[base + 1]);
    row.M = parse_double(cols[base + 2]);
    table.rows.push_back(row);
  }
  return table;
}

void write_config_csv(std::ostream& os, const ParticleConfig& config) {
  const int dim = config.dimension();
  os << "id,parent";
  for (int a = 0; a < dim; ++a) os << ",x" << (a + 1);
  os << '\n';
  std::array<double, 3> x{};
  for (uint64_t id = 1; id <= config.size(); ++id) {
    os << id << ',';
    const auto& parent = config.parents[id - 1];
    if (parent) os << *parent;
    config.index.point(id, std::span<double>(x.data(),
                                             static_cast<std::size_t>(dim)));
    for (int a = 0; a < dim; ++a)
      os << ',' << format_double(x[static_cast<std::size_t>(a)]);
    os << '\n';
  }
}

ConfigTable read_config_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("read_config_csv: missing header");
  auto cols = split_csv(line);
  if (cols.size() < 3 || cols[0] != "id" || cols[1] != "parent")
    throw std::invalid_argument("read_config_csv: bad header '" + line + "'");
  ConfigTable table;
  table.dimension = dimension_from_header(cols, 2);
  const std::size_t expect = 2 + static_cast<std::size_t>(table.dimension);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    cols = split_csv(line);
    if (cols.size() != expect)
      throw std::invalid_argument("read_config_csv: line " +
                                  std::to_string(lineno) + ": expected " +
                                  std::to_string(expect) + " fields");
    ConfigRow row;
    row.id = parse_u64(cols[0]);
    if (!cols[1].empty()) row.parent = parse_u64(cols[1]);
    for (int a = 0; a < table.dimension; ++a)
      row.x[static_cast<std::size_t>(a)] =
          parse_double(cols[2 + static_cast<std::size_t>(a)]);
    table.rows.push_back(row);
  }
  return table;
}

ReplicaSummary summarize(Trace& trace) {
  ReplicaSummary s;
  s.model = model_name(trace.model.variant);
  s.replica = trace.replica;
  s.seed = trace.seed;
  s.steps = trace.steps;
  s.final_n = trace.config.size();
  const int dim = trace.config.dimension();
  s.bbox_lo.resize(static_cast<std::size_t>(dim));
  s.bbox_hi.resize(static_cast<std::size_t>(dim));
  double diameter = 0.0;
  for (int a = 0; a < dim; ++a) {
    const auto col = trace.config.index.column(a);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    s.bbox_lo[static_cast<std::size_t>(a)] = *lo;
    s.bbox_hi[static_cast<std::size_t>(a)] = *hi;
    diameter = std::max(diameter, *hi - *lo);
  }
  s.diameter = diameter;
  s.dstar = trace.config.size() >= 2
                ? trace.config.index.max_spacing()
                : std::numeric_limits<double>::quiet_NaN();
  return s;
}

std::string summary_json(const ReplicaSummary& s) {
  nlohmann::ordered_json j;
  j["model"] = s.model;
  j["replica"] = s.replica;
  j["seed"] = s.seed;
  j["steps"] = s.steps;
  j["final_n"] = s.final_n;
  j["bbox_lo"] = s.bbox_lo;
  j["bbox_hi"] = s.bbox_hi;
  j["diameter"] = s.diameter;
  if (std::isnan(s.dstar))
    j["dstar"] = nullptr;
  else
    j["dstar"] = s.dstar;
  return j.dump();
}

ReplicaSummary parse_summary_json(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  ReplicaSummary s;
  s.model = j.at("model").get<std::string>();
  s.replica = j.at("replica").get<uint64_t>();
  s.seed = j.at("seed").get<uint64_t>();
  s.steps = j.at("steps").get<uint64_t>();
  s.final_n = j.at("final_n").get<uint64_t>();
  s.bbox_lo = j.at("bbox_lo").get<std::vector<double>>();
  s.bbox_hi = j.at("bbox_hi").get<std::vector<double>>();
  s.diameter = j.at("diameter").get<double>();
  s.dstar = j.at("dstar").is_null()
                ? std::numeric_limits<double>::quiet_NaN()
                : j.at("dstar").get<double>();
  return s;
}

void write_scatter_svg(std::ostream& os,
                       std::span<const std::array<double, 2>> points,
                       std::span<const std::size_t> epoch_breaks,
                       int size_px) {
  if (epoch_breaks.empty() || epoch_breaks.back() != points.size())
    throw std::invalid_argument(
        "write_scatter_svg: epoch breaks must end at the point count");
  for (std::size_t i = 1; i < epoch_breaks.size(); ++i)
    if (epoch_breaks[i] < epoch_breaks[i - 1])
      throw std::invalid_argument(
          "write_scatter_svg: epoch breaks must be nondecreasing");

  double lo_x = 0, hi_x = 1, lo_y = 0, hi_y = 1;
  if (!points.empty()) {
    lo_x = hi_x = points[0][0];
    lo_y = hi_y = points[0][1];
    for (const auto& p : points) {
      lo_x = std::min(lo_x, p[0]);
      hi_x = std::max(hi_x, p[0]);
      lo_y = std::min(lo_y, p[1]);
      hi_y = std::max(hi_y, p[1]);
    }
  }
  const double span_x = hi_x - lo_x, span_y = hi_y - lo_y;
  const double span = std::max({span_x, span_y, 1e-12});
  const double margin = 0.04 * span;
  const double scale = static_cast<double>(size_px) / (span + 2 * margin);
  auto px = [&](double v, double lo) {
    return (v - lo + margin) * scale;
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px
     << "\" height=\"" << size_px << "\" viewBox=\"0 0 " << size_px << ' '
     << size_px << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::size_t stages = epoch_breaks.size();
  std::size_t start = 0;
  for (std::size_t e = 0; e < stages; ++e) {
    // early epochs light grey, the last one near black
    const int shade =
        stages == 1 ? 40
                    : 200 - static_cast<int>(160.0 * static_cast<double>(e) /
                                             static_cast<double>(stages - 1));
    os << "<g fill=\"rgb(" << shade << ',' << shade << ',' << shade
       << ")\">\n";
    for (std::size_t i = start; i < epoch_breaks[e]; ++i) {
      const double cx = px(points[i][0], lo_x);
      const double cy = static_cast<double>(size_px) - px(points[i][1], lo_y);
      os << "<circle cx=\"" << format_double(cx) << "\" cy=\""
         << format_double(cy) << "\" r=\"1.1\"/>\n";
    }
    os << "</g>\n";
    start = epoch_breaks[e];
  }
  os << "</svg>\n";
}

}  // namespace lisa::io
