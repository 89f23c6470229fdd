#pragma once

// Weighted disk selection in the plane and the shifted-grid dynamic program
// for unit-value advertisers in Euclidean layouts.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adslate/core.hpp"

namespace adslate {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

double euclidean(Point2 a, Point2 b);

/// Open disk. `site` is the slot whose position is the center, or -1.
struct Disk2D {
  Point2 center;
  double radius = 0.0;
  double weight = 0.0;
  int site = -1;
  int partner = -1;
};

/// Pick at most `budget` disks so that no chosen center lies strictly inside
/// another chosen disk.
struct WdsInstance {
  std::vector<Disk2D> disks;
  int budget = 0;
  /// Distances between sites. When both disks carry a site, coverage is
  /// decided on this table so results agree with the slot metric bit for bit.
  Metric sites;

  int size() const { return static_cast<int>(disks.size()); }
  /// Disk a strictly covers the center of disk b.
  bool covers_center(int a, int b) const;
  bool conflict(int a, int b) const { return covers_center(a, b) || covers_center(b, a); }
};

/// Empty string when feasible.
std::string wds_infeasibility(const WdsInstance& wds, const std::vector<int>& chosen);
double wds_value(const WdsInstance& wds, const std::vector<int>& chosen);

/// k = floor(1/eps); throws std::invalid_argument unless eps lies in (0, 1/2].
int grid_k(double eps);

/// Disk (p_j, d(j,j'), u_j d(j,j')) for every ordered pair with d(j,j') >= eps/m,
/// budget n. Requires every advertiser row to equal u, and the instance metric
/// to be the Euclidean distances of `points` divided by their diameter.
WdsInstance reduce_nn_to_wds(const Instance& instance, const std::vector<Point2>& points, double eps);

struct GridCell {
  int level = -1;  // -1 for the root
  std::int64_t cx = 0, cy = 0;
  int parent = -1;
  std::vector<int> children;
  std::vector<int> disks;  // surviving disks of this level whose center lies here
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;  // closed rectangle, infinite for the root
};

/// Shifted grids for one offset pair. Geometry is in rescaled coordinates where
/// the largest disk has diameter 1; level j lines sit at multiples t (k+1)^-j
/// with t = alpha (mod k) vertically and t = beta (mod k) horizontally.
struct GridHierarchy {
  int k = 2;
  int alpha = 0, beta = 0;
  int deepest = 0;     // deepest disk level
  double scale = 1.0;  // rescaled = original * scale
  std::vector<int> level_of;
  std::vector<char> survives;
  std::vector<int> cell_of;  // -1 for removed disks
  std::vector<GridCell> cells;  // cells[0] is the root

  double unit(int level) const;  // (k+1)^-level
  bool disk_touches_cell(const WdsInstance& wds, int disk, int cell) const;
};

GridHierarchy build_grid_hierarchy(const WdsInstance& wds, double eps, int alpha, int beta);

class PtasWorkLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PtasOptions {
  std::int64_t work_cap = 100'000'000;  // per offset pair
  bool parallel = true;
};

struct OffsetOutcome {
  int alpha = 0, beta = 0;
  int survivors = 0;
  double value = 0.0;
  std::vector<int> chosen;
  std::int64_t work = 0;
  std::int64_t table_entries = 0;
  int max_boundary = 0;  // largest |S| seen
  int max_local = 0;     // largest |S'| seen
};

struct PtasResult {
  int k = 2;
  double eps = 0.5;
  Selection selection;
  int alpha = 0, beta = 0;
  double boundary_bound = 0.0;  // 10000 k^2/pi + 20
  double local_bound = 0.0;     // 16 k^2/pi
  std::vector<OffsetOutcome> offsets;  // row-major in (alpha, beta)
};

double boundary_set_bound(int k);
double local_set_bound(int k);

/// Dynamic program over one hierarchy. Throws PtasWorkLimit past the cap and
/// std::logic_error when a cardinality bound is exceeded.
OffsetOutcome ptas_dp(const WdsInstance& wds, const GridHierarchy& grid, const PtasOptions& options = {});

/// Best DP result over all k^2 offsets; ties go to the smallest (alpha, beta).
PtasResult ptas_wds(const WdsInstance& wds, double eps, const PtasOptions& options = {});

/// One distinct advertiser per chosen disk, placed on the disk's site.
Matching wds_selection_to_matching(const std::vector<int>& chosen, const WdsInstance& wds, const Instance& instance);

struct PtasAllocation {
  Matching matching;
  double welfare = 0.0;
  PtasResult dp;
  bool single_slot = false;  // the best lone slot beat the DP matching
};

PtasAllocation ptas_allocate(const Instance& instance, const std::vector<Point2>& points, double eps,
                             const PtasOptions& options = {});

}  // namespace adslate
