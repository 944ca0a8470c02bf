#include "saea/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "saea/error.hpp"

namespace saea {

namespace {

constexpr double kPi = std::numbers::pi;

struct NamedId {
  std::string_view name;
  ProblemId id;
};

constexpr std::array<NamedId, 12> kNames{{
    {"zdt1", ProblemId::kZdt1},
    {"zdt2", ProblemId::kZdt2},
    {"zdt3", ProblemId::kZdt3},
    {"zdt4", ProblemId::kZdt4},
    {"zdt6", ProblemId::kZdt6},
    {"dtlz1", ProblemId::kDtlz1},
    {"dtlz2", ProblemId::kDtlz2},
    {"dtlz3", ProblemId::kDtlz3},
    {"dtlz4", ProblemId::kDtlz4},
    {"dtlz5", ProblemId::kDtlz5},
    {"dtlz6", ProblemId::kDtlz6},
    {"dtlz7", ProblemId::kDtlz7},
}};

bool is_zdt(ProblemId id) {
  switch (id) {
    case ProblemId::kZdt1:
    case ProblemId::kZdt2:
    case ProblemId::kZdt3:
    case ProblemId::kZdt4:
    case ProblemId::kZdt6:
      return true;
    default:
      return false;
  }
}

// Non-dominated f1 intervals of the ZDT3 front.
constexpr std::array<std::array<double, 2>, 5> kZdt3Segments{{
    {0.0, 0.0830015349},
    {0.1822287280, 0.2577623634},
    {0.4093136748, 0.4538821041},
    {0.6183967944, 0.6525117038},
    {0.8233317983, 0.8518328654},
}};

// ZDT6 front starts where f1 = 1 - exp(-4 x1) sin^6(6 pi x1) reaches its minimum.
constexpr double kZdt6MinF1 = 0.2807753191;

// Per-coordinate non-dominated intervals of the DTLZ7 front.
constexpr std::array<std::array<double, 2>, 2> kDtlz7Intervals{{{0.0, 0.2514118360}, {0.6316265307, 0.8594008566}}};

double dtlz1_g(std::span<const double> xm) {
  double sum = 0.0;
  for (double v : xm) sum += (v - 0.5) * (v - 0.5) - std::cos(20.0 * kPi * (v - 0.5));
  return 100.0 * (static_cast<double>(xm.size()) + sum);
}

double sphere_g(std::span<const double> xm) {
  double sum = 0.0;
  for (double v : xm) sum += (v - 0.5) * (v - 0.5);
  return sum;
}

// f_i = (1 + g) prod_{j < m-i} cos(theta_j) * sin(theta_{m-i}) for i > 0.
ObjectiveVector spherical(std::span<const double> theta, double radius, std::size_t m) {
  ObjectiveVector f(m, radius);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j + i + 1 < m; ++j) f[i] *= std::cos(theta[j]);
    if (i > 0) f[i] *= std::sin(theta[m - i - 1]);
  }
  return f;
}

double sample_dtlz7_coordinate(Rng& rng) {
  const double w0 = kDtlz7Intervals[0][1] - kDtlz7Intervals[0][0];
  const double w1 = kDtlz7Intervals[1][1] - kDtlz7Intervals[1][0];
  const double u = rng.uniform() * (w0 + w1);
  return u < w0 ? kDtlz7Intervals[0][0] + u : kDtlz7Intervals[1][0] + (u - w0);
}

}  // namespace

bool Bounds::contains(const DecisionVector& x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  return true;
}

double Bounds::clamp(std::size_t i, double v) const { return std::clamp(v, lower[i], upper[i]); }

std::string_view to_string(ProblemId id) {
  for (const auto& entry : kNames)
    if (entry.id == id) return entry.name;
  return "unknown";
}

ProblemId parse_problem_id(std::string_view name) {
  for (const auto& entry : kNames)
    if (entry.name == name) return entry.id;
  raise(ErrorCode::kUnsupported, "unknown problem id '" + std::string(name) + "'");
}

const std::vector<ProblemId>& all_problem_ids() {
  static const std::vector<ProblemId> ids = [] {
    std::vector<ProblemId> out;
    for (const auto& entry : kNames) out.push_back(entry.id);
    return out;
  }();
  return ids;
}

Problem::Problem(ProblemId id, std::size_t n, std::optional<std::size_t> m) : id_(id), n_(n) {
  if (is_zdt(id)) {
    require(!m || *m == 2, "ZDT problems are bi-objective");
    require(n >= 2, "ZDT problems need at least 2 variables");
    m_ = 2;
  } else {
    m_ = m.value_or(3);
    require(m_ >= 2, "DTLZ problems need at least 2 objectives");
    require(n >= m_, "DTLZ problems need n >= m");
  }
  bounds_.lower.assign(n_, 0.0);
  bounds_.upper.assign(n_, 1.0);
  if (id == ProblemId::kZdt4) {
    for (std::size_t i = 1; i < n_; ++i) {
      bounds_.lower[i] = -5.0;
      bounds_.upper[i] = 5.0;
    }
  }
}

ObjectiveVector Problem::evaluate(std::span<const double> x) const {
  require(x.size() == n_, "decision vector has " + std::to_string(x.size()) + " entries, expected " +
                              std::to_string(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    require(x[i] >= bounds_.lower[i] && x[i] <= bounds_.upper[i],
            "decision variable " + std::to_string(i) + " is outside its bounds");
  }
  return is_zdt(id_) ? evaluate_zdt(x) : evaluate_dtlz(x);
}

ObjectiveVector Problem::evaluate_zdt(std::span<const double> x) const {
  const double tail = static_cast<double>(n_ - 1);
  double sum = 0.0;
  for (std::size_t i = 1; i < n_; ++i) sum += x[i];

  double f1 = x[0];
  double g = 1.0 + 9.0 * sum / tail;
  double f2 = 0.0;
  switch (id_) {
    case ProblemId::kZdt1:
      f2 = g * (1.0 - std::sqrt(f1 / g));
      break;
    case ProblemId::kZdt2:
      f2 = g * (1.0 - (f1 / g) * (f1 / g));
      break;
    case ProblemId::kZdt3:
      f2 = g * (1.0 - std::sqrt(f1 / g) - (f1 / g) * std::sin(10.0 * kPi * f1));
      break;
    case ProblemId::kZdt4: {
      double s = 0.0;
      for (std::size_t i = 1; i < n_; ++i) s += x[i] * x[i] - 10.0 * std::cos(4.0 * kPi * x[i]);
      g = 1.0 + 10.0 * tail + s;
      f2 = g * (1.0 - std::sqrt(f1 / g));
      break;
    }
    case ProblemId::kZdt6: {
      f1 = 1.0 - std::exp(-4.0 * x[0]) * std::pow(std::sin(6.0 * kPi * x[0]), 6);
      g = 1.0 + 9.0 * std::pow(sum / tail, 0.25);
      f2 = g * (1.0 - (f1 / g) * (f1 / g));
      break;
    }
    default:
      raise(ErrorCode::kUnsupported, "not a ZDT problem");
  }
  return {f1, f2};
}

ObjectiveVector Problem::evaluate_dtlz(std::span<const double> x) const {
  const std::size_t pos = m_ - 1;
  const auto xm = x.subspan(pos);
  std::vector<double> theta(pos);

  switch (id_) {
    case ProblemId::kDtlz1: {
      const double g = dtlz1_g(xm);
      ObjectiveVector f(m_, 0.5 * (1.0 + g));
      for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j + i + 1 < m_; ++j) f[i] *= x[j];
        if (i > 0) f[i] *= 1.0 - x[m_ - i - 1];
      }
      return f;
    }
    case ProblemId::kDtlz2:
    case ProblemId::kDtlz3:
    case ProblemId::kDtlz4: {
      const double g = id_ == ProblemId::kDtlz3 ? dtlz1_g(xm) : sphere_g(xm);
      const double alpha = id_ == ProblemId::kDtlz4 ? 100.0 : 1.0;
      for (std::size_t j = 0; j < pos; ++j) theta[j] = std::pow(x[j], alpha) * kPi / 2.0;
      return spherical(theta, 1.0 + g, m_);
    }
    case ProblemId::kDtlz5:
    case ProblemId::kDtlz6: {
      double g = 0.0;
      if (id_ == ProblemId::kDtlz5) {
        g = sphere_g(xm);
      } else {
        for (double v : xm) g += std::pow(v, 0.1);
      }
      theta[0] = x[0] * kPi / 2.0;
      for (std::size_t j = 1; j < pos; ++j) theta[j] = kPi / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[j]);
      return spherical(theta, 1.0 + g, m_);
    }
    case ProblemId::kDtlz7: {
      double g = 0.0;
      for (double v : xm) g += v;
      g = 1.0 + 9.0 * g / static_cast<double>(xm.size());
      ObjectiveVector f(m_);
      double h = static_cast<double>(m_);
      for (std::size_t i = 0; i < pos; ++i) {
        f[i] = x[i];
        h -= f[i] / (1.0 + g) * (1.0 + std::sin(3.0 * kPi * f[i]));
      }
      f[pos] = (1.0 + g) * h;
      return f;
    }
    default:
      raise(ErrorCode::kUnsupported, "not a DTLZ problem");
  }
}

ParetoFrontSample sample_true_pf(const Problem& problem, std::size_t count, Rng& rng) {
  require(count >= 2, "a front sample needs at least 2 points");
  const std::size_t m = problem.num_objectives();
  ParetoFrontSample out;
  out.points.reserve(count);
  const auto grid = [count](std::size_t i) { return static_cast<double>(i) / static_cast<double>(count - 1); };

  switch (problem.id()) {
    case ProblemId::kZdt1:
    case ProblemId::kZdt4:
      for (std::size_t i = 0; i < count; ++i) out.points.push_back({grid(i), 1.0 - std::sqrt(grid(i))});
      break;
    case ProblemId::kZdt2:
      for (std::size_t i = 0; i < count; ++i) out.points.push_back({grid(i), 1.0 - grid(i) * grid(i)});
      break;
    case ProblemId::kZdt6:
      for (std::size_t i = 0; i < count; ++i) {
        const double f1 = kZdt6MinF1 + (1.0 - kZdt6MinF1) * grid(i);
        out.points.push_back({f1, 1.0 - f1 * f1});
      }
      break;
    case ProblemId::kZdt3: {
      double total = 0.0;
      for (const auto& s : kZdt3Segments) total += s[1] - s[0];
      for (std::size_t i = 0; i < count; ++i) {
        // Walk the concatenated segments as if they were one interval.
        double t = grid(i) * total;
        double f1 = kZdt3Segments.back()[1];
        for (const auto& s : kZdt3Segments) {
          if (t <= s[1] - s[0]) {
            f1 = s[0] + t;
            break;
          }
          t -= s[1] - s[0];
        }
        out.points.push_back({f1, 1.0 - std::sqrt(f1) - f1 * std::sin(10.0 * kPi * f1)});
      }
      break;
    }
    case ProblemId::kDtlz1:
      for (std::size_t i = 0; i < count; ++i) {
        ObjectiveVector f(m);
        double sum = 0.0;
        for (auto& v : f) {
          v = -std::log(1.0 - rng.uniform());
          sum += v;
        }
        for (auto& v : f) v = 0.5 * v / sum;
        out.points.push_back(std::move(f));
      }
      break;
    case ProblemId::kDtlz2:
    case ProblemId::kDtlz3:
    case ProblemId::kDtlz4:
      for (std::size_t i = 0; i < count; ++i) {
        ObjectiveVector f(m);
        double norm = 0.0;
        do {
          norm = 0.0;
          for (auto& v : f) {
            v = std::abs(rng.normal());
            norm += v * v;
          }
        } while (norm <= 0.0);
        norm = std::sqrt(norm);
        for (auto& v : f) v /= norm;
        out.points.push_back(std::move(f));
      }
      break;
    case ProblemId::kDtlz5:
    case ProblemId::kDtlz6:
      // Degenerate curve: theta_1 free, remaining angles fixed at pi/4.
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> theta(m - 1, kPi / 4.0);
        theta[0] = rng.uniform() * kPi / 2.0;
        out.points.push_back(spherical(theta, 1.0, m));
      }
      break;
    case ProblemId::kDtlz7:
      for (std::size_t i = 0; i < count; ++i) {
        ObjectiveVector f(m);
        double h = static_cast<double>(m);
        for (std::size_t j = 0; j + 1 < m; ++j) {
          f[j] = sample_dtlz7_coordinate(rng);
          h -= f[j] / 2.0 * (1.0 + std::sin(3.0 * kPi * f[j]));
        }
        f[m - 1] = 2.0 * h;
        out.points.push_back(std::move(f));
      }
      break;
  }
  return out;
}

ParetoFrontSample reference_front(const Problem& problem, std::size_t count) {
  // FNV-1a over the id keeps the seed stable across builds.
  std::uint64_t seed = 1469598103934665603ULL;
  for (char c : problem.name()) {
    seed ^= static_cast<unsigned char>(c);
    seed *= 1099511628211ULL;
  }
  seed ^= problem.num_objectives();
  Rng rng(seed);
  return sample_true_pf(problem, count, rng);
}

}  // namespace saea
