#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace alns {

using Node = int;
using Cost = std::int64_t;

enum class EdgeWeightType { euc_2d, ceil_2d, att };

std::string_view to_string(EdgeWeightType type);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

class TsplibError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer distance between two points under the TSPLIB rounding convention
/// of `type`.
Cost rounded_distance(Point a, Point b, EdgeWeightType type);

/// Symmetric TSP instance with a precomputed integer distance matrix.
/// Immutable after construction.
class Instance {
 public:
  Instance(std::string name, std::vector<Point> coords, EdgeWeightType type);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return n_; }
  const std::vector<Point>& coords() const noexcept { return coords_; }
  EdgeWeightType edge_weight_type() const noexcept { return type_; }

  Cost dist(Node i, Node j) const noexcept {
    return dist_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }

  Cost max_distance() const noexcept { return max_dist_; }

 private:
  std::string name_;
  std::size_t n_;
  std::vector<Point> coords_;
  EdgeWeightType type_;
  std::vector<Cost> dist_;
  Cost max_dist_ = 0;
};

/// Parses a TSPLIB document (NODE_COORD_SECTION variant).
Instance parse_tsplib(std::string_view text);
Instance load_tsplib(const std::filesystem::path& path);

/// Uniform random EUC_2D instance on [0, extent)^2.
Instance make_random_instance(std::size_t n, std::uint64_t seed, double extent = 1000.0,
                              std::string name = {});

bool is_valid_permutation(std::span<const Node> order, std::size_t n);

/// Closed tour length. Throws std::invalid_argument when `order` is not a
/// permutation of 0..n-1.
Cost tour_cost(const Instance& instance, std::span<const Node> order);

/// Relative percentage error (cost - bks) / bks * 100.
double gap_percent(Cost cost, Cost bks);

struct Tour {
  std::vector<Node> order;
  Cost cost = 0;

  static Tour from_order(const Instance& instance, std::vector<Node> order);
};

/// Result of a destroy step: surviving nodes in tour order plus removed nodes.
struct PartialSolution {
  std::vector<Node> fragment;
  std::vector<Node> unrouted;
};

/// True iff fragment and unrouted partition 0..n-1.
bool is_valid_partial(const PartialSolution& partial, std::size_t n);

class BksTable {
 public:
  static BksTable parse(std::string_view text);
  static BksTable load(const std::filesystem::path& path);

  bool contains(std::string_view name) const;
  /// Throws std::out_of_range for unknown names.
  Cost at(std::string_view name) const;
  std::size_t size() const noexcept { return costs_.size(); }
  const std::map<std::string, Cost, std::less<>>& entries() const noexcept { return costs_; }

 private:
  std::map<std::string, Cost, std::less<>> costs_;
};

/// Reads a TSPLIB .opt.tour (1-based TOUR_SECTION, -1 terminated) into
/// 0-based node indices.
std::vector<Node> parse_opt_tour(std::string_view text);
std::vector<Node> load_opt_tour(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace alns
