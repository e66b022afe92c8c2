#include "alns/tsp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "alns/rng.hpp"

namespace alns {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto pos = text.find('\n');
    lines.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  // std::from_chars for double is not available on every toolchain we target.
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str() || *end != '\0') return std::nullopt;
  return v;
}

std::optional<long long> to_integer(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Cost nint(double x) { return static_cast<Cost>(x + 0.5); }

}  // namespace

std::string_view to_string(EdgeWeightType type) {
  switch (type) {
    case EdgeWeightType::euc_2d: return "EUC_2D";
    case EdgeWeightType::ceil_2d: return "CEIL_2D";
    case EdgeWeightType::att: return "ATT";
  }
  return "?";
}

Cost rounded_distance(Point a, Point b, EdgeWeightType type) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  switch (type) {
    case EdgeWeightType::euc_2d: return nint(std::sqrt(dx * dx + dy * dy));
    case EdgeWeightType::ceil_2d: return static_cast<Cost>(std::ceil(std::sqrt(dx * dx + dy * dy)));
    case EdgeWeightType::att: {
      const double r = std::sqrt((dx * dx + dy * dy) / 10.0);
      const Cost t = nint(r);
      return static_cast<double>(t) < r ? t + 1 : t;
    }
  }
  return 0;
}

Instance::Instance(std::string name, std::vector<Point> coords, EdgeWeightType type)
    : name_(std::move(name)), n_(coords.size()), coords_(std::move(coords)), type_(type) {
  if (n_ < 3) throw std::invalid_argument("instance needs at least 3 nodes");
  dist_.assign(n_ * n_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const Cost d = rounded_distance(coords_[i], coords_[j], type_);
      dist_[i * n_ + j] = d;
      dist_[j * n_ + i] = d;
      max_dist_ = std::max(max_dist_, d);
    }
  }
}

Instance parse_tsplib(std::string_view text) {
  std::optional<std::string> name;
  std::optional<long long> dimension;
  std::optional<EdgeWeightType> type;
  bool have_section = false;
  std::vector<Point> coords;

  const auto lines = split_lines(text);
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (line == "EOF") break;
    if (line.starts_with("NODE_COORD_SECTION")) {
      have_section = true;
      ++i;
      break;
    }
    if (line.starts_with("FIXED_EDGES_SECTION")) {
      // fixed edges are not enforced; skip the list up to its -1 terminator
      while (++i < lines.size() && trim(lines[i]) != "-1") {
      }
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw TsplibError("malformed header line: " + std::string(line));
    }
    const auto key = trim(line.substr(0, colon));
    const auto value = trim(line.substr(colon + 1));
    if (key == "NAME") {
      name = std::string(value);
    } else if (key == "DIMENSION") {
      dimension = to_integer(value);
      if (!dimension) throw TsplibError("invalid DIMENSION: " + std::string(value));
    } else if (key == "TYPE") {
      if (value != "TSP") throw TsplibError("unsupported problem TYPE: " + std::string(value));
    } else if (key == "EDGE_WEIGHT_TYPE") {
      if (value == "EUC_2D") {
        type = EdgeWeightType::euc_2d;
      } else if (value == "CEIL_2D") {
        type = EdgeWeightType::ceil_2d;
      } else if (value == "ATT") {
        type = EdgeWeightType::att;
      } else {
        throw TsplibError("unsupported EDGE_WEIGHT_TYPE: " + std::string(value));
      }
    }
  }

  if (!name) throw TsplibError("missing NAME");
  if (!dimension) throw TsplibError("missing DIMENSION");
  if (!type) throw TsplibError("missing EDGE_WEIGHT_TYPE");
  if (!have_section) throw TsplibError("missing NODE_COORD_SECTION");
  if (*dimension < 3) throw TsplibError("DIMENSION must be at least 3");

  std::vector<bool> seen(static_cast<std::size_t>(*dimension), false);
  coords.assign(static_cast<std::size_t>(*dimension), Point{});
  std::size_t count = 0;
  for (; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (line == "EOF") break;
    const auto fields = split_ws(line);
    if (fields.size() != 3) {
      // Another section (e.g. DISPLAY_DATA_SECTION) ends the coordinates.
      if (!to_integer(fields.front())) break;
      throw TsplibError("malformed coordinate line: " + std::string(line));
    }
    const auto id = to_integer(fields[0]);
    const auto x = to_double(fields[1]);
    const auto y = to_double(fields[2]);
    if (!id || !x || !y) throw TsplibError("malformed coordinate line: " + std::string(line));
    if (*id < 1 || *id > *dimension) {
      throw TsplibError("node id out of range: " + std::string(fields[0]));
    }
    const auto idx = static_cast<std::size_t>(*id - 1);
    if (seen[idx]) throw TsplibError("duplicate node id: " + std::string(fields[0]));
    seen[idx] = true;
    coords[idx] = Point{*x, *y};
    ++count;
  }
  if (count != static_cast<std::size_t>(*dimension)) {
    throw TsplibError("coordinate count " + std::to_string(count) + " does not match DIMENSION " +
                      std::to_string(*dimension));
  }
  return Instance(*name, std::move(coords), *type);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance load_tsplib(const std::filesystem::path& path) { return parse_tsplib(read_text_file(path)); }

Instance make_random_instance(std::size_t n, std::uint64_t seed, double extent, std::string name) {
  Rng rng(seed);
  std::vector<Point> coords(n);
  for (auto& p : coords) {
    p.x = rng.uniform(0.0, extent);
    p.y = rng.uniform(0.0, extent);
  }
  if (name.empty()) name = "rand" + std::to_string(n) + "-" + std::to_string(seed);
  return Instance(std::move(name), std::move(coords), EdgeWeightType::euc_2d);
}

bool is_valid_permutation(std::span<const Node> order, std::size_t n) {
  if (order.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (Node v : order) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

Cost tour_cost(const Instance& instance, std::span<const Node> order) {
  if (!is_valid_permutation(order, instance.size())) {
    throw std::invalid_argument("tour is not a permutation of the instance nodes");
  }
  Cost total = 0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) total += instance.dist(order[i], order[i + 1]);
  total += instance.dist(order.back(), order.front());
  return total;
}

double gap_percent(Cost cost, Cost bks) {
  if (bks <= 0) throw std::invalid_argument("best-known cost must be positive");
  return static_cast<double>(cost - bks) / static_cast<double>(bks) * 100.0;
}

Tour Tour::from_order(const Instance& instance, std::vector<Node> order) {
  const Cost cost = tour_cost(instance, order);
  return Tour{std::move(order), cost};
}

bool is_valid_partial(const PartialSolution& partial, std::size_t n) {
  if (partial.fragment.size() + partial.unrouted.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (const auto* part : {&partial.fragment, &partial.unrouted}) {
    for (Node v : *part) {
      if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)]) return false;
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
  return true;
}

BksTable BksTable::parse(std::string_view text) {
  BksTable table;
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_ws(line);
    if (fields.size() != 2) throw std::runtime_error("malformed BKS line: " + std::string(line));
    const auto cost = to_integer(fields[1]);
    if (!cost || *cost <= 0) throw std::runtime_error("invalid BKS cost: " + std::string(line));
    table.costs_[std::string(fields[0])] = *cost;
  }
  return table;
}

BksTable BksTable::load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

bool BksTable::contains(std::string_view name) const { return costs_.find(name) != costs_.end(); }

Cost BksTable::at(std::string_view name) const {
  const auto it = costs_.find(name);
  if (it == costs_.end()) throw std::out_of_range("no best-known cost for " + std::string(name));
  return it->second;
}

std::vector<Node> parse_opt_tour(std::string_view text) {
  std::vector<Node> order;
  bool in_section = false;
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (!in_section) {
      if (line.starts_with("TOUR_SECTION")) in_section = true;
      continue;
    }
    for (auto field : split_ws(line)) {
      const auto v = to_integer(field);
      if (!v) throw TsplibError("malformed tour entry: " + std::string(field));
      if (*v == -1) return order;
      order.push_back(static_cast<Node>(*v - 1));
    }
  }
  if (!in_section) throw TsplibError("missing TOUR_SECTION");
  return order;
}

std::vector<Node> load_opt_tour(const std::filesystem::path& path) {
  return parse_opt_tour(read_text_file(path));
}

}  // namespace alns
