#include "saea/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "saea/error.hpp"
#include "saea/moea.hpp"

namespace saea {

namespace {

using Points = std::vector<ObjectiveVector>;

double box_volume(const ObjectiveVector& p, std::span<const double> ref) {
  double v = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) v *= ref[i] - p[i];
  return v;
}

bool weakly_dominates(const ObjectiveVector& u, const ObjectiveVector& v) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] > v[i]) return false;
  return true;
}

// Keeps one representative of every point that no other point weakly dominates.
Points nondominated(Points pts) {
  Points out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < pts.size() && keep; ++j) {
      if (i == j) continue;
      if (weakly_dominates(pts[j], pts[i]) && (pts[j] != pts[i] || j < i)) keep = false;
    }
    if (keep) out.push_back(pts[i]);
  }
  return out;
}

double hv2d(Points pts, std::span<const double> ref) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double ceiling = ref[1];
  for (const auto& p : pts) {
    if (p[1] < ceiling) {
      area += (ref[0] - p[0]) * (ceiling - p[1]);
      ceiling = p[1];
    }
  }
  return area;
}

double hv_recursive(Points pts, std::span<const double> ref) {
  if (pts.empty()) return 0.0;
  const std::size_t m = ref.size();
  if (m == 1) {
    double best = pts.front()[0];
    for (const auto& p : pts) best = std::min(best, p[0]);
    return ref[0] - best;
  }
  if (m == 2) return hv2d(std::move(pts), ref);
  if (pts.size() == 1) return box_volume(pts.front(), ref);

  // Sorting on the last objective keeps the limited sets small.
  std::sort(pts.begin(), pts.end(), [m](const auto& a, const auto& b) { return a[m - 1] < b[m - 1]; });
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Points limited;
    limited.reserve(pts.size() - i - 1);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      ObjectiveVector q(m);
      for (std::size_t k = 0; k < m; ++k) q[k] = std::max(pts[i][k], pts[j][k]);
      limited.push_back(std::move(q));
    }
    total += box_volume(pts[i], ref) - hv_recursive(nondominated(std::move(limited)), ref);
  }
  return total;
}

bool inside(const ObjectiveVector& p, std::span<const double> ref) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!(p[i] < ref[i])) return false;
  return true;
}

void check_dimensions(std::span<const ObjectiveVector> points, std::span<const double> ref) {
  require(!ref.empty(), "reference point is empty");
  for (const auto& p : points)
    require(p.size() == ref.size(), "point dimension does not match the reference point");
}

}  // namespace

double hypervolume(std::span<const ObjectiveVector> points, std::span<const double> ref) {
  check_dimensions(points, ref);
  Points kept;
  for (const auto& p : points)
    if (inside(p, ref)) kept.push_back(p);
  if (kept.empty()) return 0.0;
  return hv_recursive(nondominated(std::move(kept)), ref);
}

double hypervolume_contribution(std::span<const ObjectiveVector> points, std::span<const double> ref,
                                std::size_t index) {
  check_dimensions(points, ref);
  require(index < points.size(), "contribution index out of range");
  const auto& p = points[index];
  if (!inside(p, ref)) return 0.0;
  const std::size_t m = ref.size();
  Points limited;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j == index || !inside(points[j], ref)) continue;
    ObjectiveVector q(m);
    for (std::size_t k = 0; k < m; ++k) q[k] = std::max(p[k], points[j][k]);
    limited.push_back(std::move(q));
  }
  const double exclusive = box_volume(p, ref) - hv_recursive(nondominated(std::move(limited)), ref);
  return std::max(exclusive, 0.0);
}

std::vector<double> hypervolume_contributions(std::span<const ObjectiveVector> points, std::span<const double> ref) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = hypervolume_contribution(points, ref, i);
  return out;
}

double igd(std::span<const ObjectiveVector> approximation, std::span<const ObjectiveVector> reference) {
  require(!approximation.empty(), "IGD of an empty approximation set");
  require(!reference.empty(), "IGD against an empty reference set");
  double total = 0.0;
  for (const auto& r : reference) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : approximation) {
      require(a.size() == r.size(), "IGD sets differ in objective count");
      double sq = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) sq += (r[k] - a[k]) * (r[k] - a[k]);
      best = std::min(best, sq);
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(reference.size());
}

std::vector<std::size_t> nondominated_indices(std::span<const ObjectiveVector> points) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) dominated = j != i && dominates(points[j], points[i]);
    if (!dominated) out.push_back(i);
  }
  return out;
}

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, double alpha) {
  require(a.size() >= 5 && b.size() >= 5, "rank-sum test needs at least 5 values per sample");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<std::pair<double, std::size_t>> pooled;  // value, source (0 = a)
  pooled.reserve(n);
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].second == 0) rank_sum_a += avg_rank;
    i = j;
  }

  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(n);
  const double expected = dna * (dn + 1.0) / 2.0;
  const double variance = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));

  RankSumResult result;
  result.rank_sum_a = rank_sum_a;
  if (!(variance > 0.0)) return result;
  const double diff = rank_sum_a - expected;
  const double corrected = diff == 0.0 ? 0.0 : diff - std::copysign(std::min(0.5, std::abs(diff)), diff);
  result.z = corrected / std::sqrt(variance);
  result.p_value = std::erfc(std::abs(result.z) / std::sqrt(2.0));
  result.significant = result.p_value < alpha;
  if (diff != 0.0) result.direction = diff < 0.0 ? ShiftDirection::kALower : ShiftDirection::kAHigher;
  return result;
}

}  // namespace saea
