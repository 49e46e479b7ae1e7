#include "cascade/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cascade {

namespace {

// Collapse fits read the lower region through a window ending at s_c1:
// sizes below max(50, s_c1/12) carry non-universal small-s corrections that
// drown the crossover alignment signal at workstation-scale statistics.
// master_curve() is presentation output and keeps the whole region.
constexpr double kLowerFitMinSize = 50.0;
constexpr double kLowerFitWindowFraction = 1.0 / 12.0;
constexpr int kSmoothingWindow = 3;

struct OccupiedBins {
  std::vector<std::size_t> index; // bin index in the full histogram
  std::vector<double> log_mid;
  std::vector<double> log_density;
  std::vector<double> smoothed;   // log-density, 3-bin moving average
};

OccupiedBins occupied_bins(const BinnedDistribution& dist) {
  OccupiedBins bins;
  for (std::size_t i = 0; i < dist.num_bins(); ++i) {
    if (dist.count(i) == 0) continue;
    bins.index.push_back(i);
    bins.log_mid.push_back(std::log10(dist.bin_mid(i)));
    bins.log_density.push_back(std::log10(dist.density(i)));
  }
  const std::size_t m = bins.log_density.size();
  bins.smoothed.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(i + 1, m - 1);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += bins.log_density[j];
    bins.smoothed[i] = acc / static_cast<double>(hi - lo + 1);
  }
  return bins;
}

}  // namespace

CrossoverResult detect_crossovers(const BinnedDistribution& dist) {
  const OccupiedBins bins = occupied_bins(dist);
  const std::size_t m = bins.smoothed.size();
  CrossoverResult result;
  if (m < 5) return result;

  // Candidate strict local minima of the smoothed curve; for each, pair it
  // with the highest later maximum. The pair with the largest rise marks the
  // decay/bump crossover (a monotone terminal tail produces no strict local
  // minimum, so pure cutoffs cannot masquerade as bumps).
  std::size_t min_idx = 0, peak_idx = 0;
  double best_rise = 0.0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    if (!(bins.smoothed[i] < bins.smoothed[i - 1] && bins.smoothed[i] < bins.smoothed[i + 1]))
      continue;
    std::size_t peak = i + 1;
    for (std::size_t j = i + 2; j < m; ++j)
      if (bins.smoothed[j] > bins.smoothed[peak]) peak = j;
    const double rise = bins.smoothed[peak] - bins.smoothed[i];
    if (rise > best_rise) {
      best_rise = rise;
      min_idx = i;
      peak_idx = peak;
    }
  }
  if (best_rise <= 0.0) return result;

  CrossoverEstimate est;
  est.smoothing_window = kSmoothingWindow;
  est.s_c1 = std::pow(10.0, bins.log_mid[min_idx]);
  est.peak_size = std::pow(10.0, bins.log_mid[peak_idx]);
  est.peak_density = std::pow(10.0, bins.smoothed[peak_idx]);

  // First bin past the peak (empty bins included) whose density drops below
  // 10% of the peak density.
  const double threshold = 0.1 * est.peak_density;
  const std::size_t peak_bin = bins.index[peak_idx];
  double s_c2 = 0.0;
  for (std::size_t b = peak_bin + 1; b <= dist.num_bins(); ++b) {
    const double density = b < dist.num_bins() ? dist.density(b) : 0.0;
    if (density < threshold) {
      s_c2 = std::pow(10.0, (static_cast<double>(b) + 0.5) / dist.bins_per_decade());
      break;
    }
  }
  if (s_c2 == 0.0) s_c2 = dist.bin_high(dist.num_bins() - 1);
  if (dist.meta().nodes > 0)
    s_c2 = std::min(s_c2, static_cast<double>(dist.meta().nodes));

  est.s_c2 = std::max(s_c2, est.s_c1 * 1.0001);
  result.has_bump = true;
  result.estimate = est;
  return result;
}

double check_scaling_relation(double tau, double mu, double zeta) {
  return std::fabs(mu * (tau + zeta) - zeta - 1.0);
}

namespace {

struct RescaledCurve {
  std::vector<double> x; // ascending log10 coordinates
  std::vector<double> y;
};

// One dataset's region points under the collapse transform, in log10 space.
// `fit_window` applies the small-s exclusion used for error evaluation.
RescaledCurve rescale(const BinnedDistribution& dist, const CrossoverEstimate& xover,
                      double tau, double mu, double zeta, Region region, bool fit_window) {
  const double log_n = std::log10(static_cast<double>(dist.meta().nodes));
  const double lower_cut =
      fit_window ? std::max(kLowerFitMinSize, kLowerFitWindowFraction * xover.s_c1) : 0.0;
  RescaledCurve curve;
  for (std::size_t i = 0; i < dist.num_bins(); ++i) {
    if (dist.count(i) == 0) continue;
    const double s = dist.bin_mid(i);
    if (region == Region::Lower) {
      if (!(s < xover.s_c1) || s < lower_cut) continue;
      curve.x.push_back(std::log10(s) - mu * log_n);
      curve.y.push_back(std::log10(dist.density(i)) + mu * tau * log_n);
    } else {
      if (!(s > xover.s_c1 && s < xover.s_c2)) continue;
      curve.x.push_back(std::log10(s) - log_n);
      curve.y.push_back(std::log10(dist.density(i)) + (mu * (tau + zeta) - zeta) * log_n);
    }
  }
  return curve;
}

// Linear interpolation at xq; exact at nodes. Callers guarantee xq is within
// [x.front(), x.back()].
double interpolate(const RescaledCurve& c, double xq) {
  const auto it = std::lower_bound(c.x.begin(), c.x.end(), xq);
  if (it == c.x.begin()) return c.y.front();
  if (it == c.x.end()) return c.y.back();
  const std::size_t hi = static_cast<std::size_t>(it - c.x.begin());
  const std::size_t lo = hi - 1;
  if (c.x[hi] == c.x[lo]) return c.y[lo];
  const double t = (xq - c.x[lo]) / (c.x[hi] - c.x[lo]);
  return c.y[lo] + t * (c.y[hi] - c.y[lo]);
}

double collapse_error_impl(const std::vector<RescaledCurve>& curves) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : curves) {
    if (c.x.size() < 2) throw std::invalid_argument("collapse region has too few points");
    lo = std::max(lo, c.x.front());
    hi = std::min(hi, c.x.back());
  }
  if (!(lo < hi)) throw std::invalid_argument("empty overlap range between datasets");

  double sum = 0.0;
  std::uint64_t terms = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = 0; j < curves.size(); ++j) {
      if (i == j) continue;
      const auto& ci = curves[i];
      const auto& cj = curves[j];
      for (std::size_t p = 0; p < ci.x.size(); ++p) {
        const double x = ci.x[p];
        if (x < lo || x > hi) continue;
        if (x < cj.x.front() || x > cj.x.back()) continue;
        const double d = ci.y[p] - interpolate(cj, x);
        sum += d * d;
        ++terms;
      }
    }
  }
  if (terms == 0) throw std::invalid_argument("empty overlap range between datasets");
  return sum / static_cast<double>(terms);
}

std::vector<CrossoverEstimate> require_bumps(std::span<const BinnedDistribution> dists) {
  std::vector<CrossoverEstimate> xovers;
  xovers.reserve(dists.size());
  for (const auto& d : dists) {
    if (d.meta().nodes == 0)
      throw std::invalid_argument("histogram metadata lacks a node count");
    const CrossoverResult r = detect_crossovers(d);
    if (!r.has_bump)
      throw std::invalid_argument("dataset without a detected bump cannot be collapsed");
    xovers.push_back(r.estimate);
  }
  return xovers;
}

double collapse_error_with(std::span<const BinnedDistribution> dists,
                           std::span<const CrossoverEstimate> xovers, double tau, double mu,
                           double zeta, Region region) {
  std::vector<RescaledCurve> curves;
  curves.reserve(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i)
    curves.push_back(rescale(dists[i], xovers[i], tau, mu, zeta, region, true));
  return collapse_error_impl(curves);
}

}  // namespace

double collapse_error(std::span<const BinnedDistribution> dists, double tau, double mu,
                      double zeta, Region region) {
  if (dists.size() < 2) throw std::invalid_argument("collapse needs at least two datasets");
  const auto xovers = require_bumps(dists);
  return collapse_error_with(dists, xovers, tau, mu, zeta, region);
}

namespace {

// Region-restricted overlap error alone cannot separate mu from zeta: for
// data that follows the two-branch form exactly, any (mu, zeta) with the
// same mu(tau+zeta) - zeta collapses equally well. The bump's rising slope
// is the direct measurement of zeta (G_> grows as x^zeta below the cutoff),
// so the estimator anchors zeta to the pooled log-log slope of the rising
// branch, fitted away from both crossovers.
std::optional<double> rising_branch_slope(std::span<const BinnedDistribution> dists,
                                          std::span<const CrossoverEstimate> xovers) {
  double weighted = 0.0, weight = 0.0;
  for (std::size_t d = 0; d < dists.size(); ++d) {
    const double lo = 3.0 * xovers[d].s_c1;
    const double hi = 0.7 * xovers[d].peak_size;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < dists[d].num_bins(); ++i) {
      if (dists[d].count(i) == 0) continue;
      const double s = dists[d].bin_mid(i);
      if (s <= lo || s >= hi) continue;
      const double lx = std::log10(s);
      const double ly = std::log10(dists[d].density(i));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    if (n < 3) continue;
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom <= 0.0) continue;
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    weighted += slope * static_cast<double>(n);
    weight += static_cast<double>(n);
  }
  if (weight == 0.0) return std::nullopt;
  return weighted / weight;
}

constexpr double kSlopeAnchorWeight = 1.0;

struct Objective {
  std::span<const BinnedDistribution> dists;
  std::span<const CrossoverEstimate> xovers;
  std::optional<double> zeta_anchor;

  // Total collapse error plus the zeta anchor; +inf outside the sanity box
  // or on empty overlaps.
  double operator()(double tau, double mu, double zeta) const {
    if (tau < 1.0 || tau > 4.0 || mu < 0.1 || mu > 1.0 || zeta < 0.1 || zeta > 2.0)
      return std::numeric_limits<double>::infinity();
    try {
      double total = collapse_error_with(dists, xovers, tau, mu, zeta, Region::Lower) +
                     collapse_error_with(dists, xovers, tau, mu, zeta, Region::Upper);
      if (zeta_anchor)
        total += kSlopeAnchorWeight * (zeta - *zeta_anchor) * (zeta - *zeta_anchor);
      return total;
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::infinity();
    }
  }
};

struct SimplexPoint {
  double v[3];
  double f;
};

// Standard Nelder-Mead on (tau, mu, zeta). Returns false if the iteration
// cap was hit before the simplex shrank below tolerance.
bool nelder_mead(const Objective& objective, double start[3], int max_iter) {
  constexpr double kInitStep[3] = {0.10, 0.04, 0.08};
  SimplexPoint simplex[4];
  for (int i = 0; i < 4; ++i) {
    for (int d = 0; d < 3; ++d) simplex[i].v[d] = start[d];
    if (i > 0) simplex[i].v[i - 1] += kInitStep[i - 1];
    simplex[i].f = objective(simplex[i].v[0], simplex[i].v[1], simplex[i].v[2]);
  }

  auto order = [&] {
    std::sort(std::begin(simplex), std::end(simplex),
              [](const SimplexPoint& a, const SimplexPoint& b) { return a.f < b.f; });
  };
  order();

  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (simplex[3].f - simplex[0].f < 1e-12 * (1.0 + std::fabs(simplex[0].f))) {
      converged = true;
      break;
    }
    double centroid[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 3; ++d) centroid[d] += simplex[i].v[d] / 3.0;

    auto blend = [&](double coeff, SimplexPoint& out) {
      for (int d = 0; d < 3; ++d)
        out.v[d] = centroid[d] + coeff * (simplex[3].v[d] - centroid[d]);
      out.f = objective(out.v[0], out.v[1], out.v[2]);
    };

    SimplexPoint reflected;
    blend(-1.0, reflected);
    if (reflected.f < simplex[0].f) {
      SimplexPoint expanded;
      blend(-2.0, expanded);
      simplex[3] = expanded.f < reflected.f ? expanded : reflected;
    } else if (reflected.f < simplex[2].f) {
      simplex[3] = reflected;
    } else {
      SimplexPoint contracted;
      blend(reflected.f < simplex[3].f ? -0.5 : 0.5, contracted);
      if (contracted.f < std::min(reflected.f, simplex[3].f)) {
        simplex[3] = contracted;
      } else {
        for (int i = 1; i < 4; ++i) {
          for (int d = 0; d < 3; ++d)
            simplex[i].v[d] = simplex[0].v[d] + 0.5 * (simplex[i].v[d] - simplex[0].v[d]);
          simplex[i].f = objective(simplex[i].v[0], simplex[i].v[1], simplex[i].v[2]);
        }
      }
    }
    order();
  }
  for (int d = 0; d < 3; ++d) start[d] = simplex[0].v[d];
  return converged;
}

}  // namespace

ExponentSet estimate_exponents(std::span<const BinnedDistribution> dists) {
  if (dists.size() < 3)
    throw std::invalid_argument("exponent estimation needs at least three system sizes");
  std::vector<std::uint64_t> sizes;
  for (const auto& d : dists) sizes.push_back(d.meta().nodes);
  std::sort(sizes.begin(), sizes.end());
  if (std::unique(sizes.begin(), sizes.end()) != sizes.end())
    throw std::invalid_argument("system sizes must be distinct");
  if (static_cast<double>(sizes.back()) < 9.999 * static_cast<double>(sizes.front()))
    throw std::invalid_argument("system sizes must span at least one decade");

  const auto xovers = require_bumps(dists);
  const Objective objective{dists, xovers, rising_branch_slope(dists, xovers)};

  double best[3] = {2.5, 0.5, 0.8};
  double best_f = std::numeric_limits<double>::infinity();
  for (double tau = 1.5; tau <= 3.5 + 1e-9; tau += 0.05) {
    for (double mu = 0.3; mu <= 0.9 + 1e-9; mu += 0.02) {
      for (double zeta = 0.4; zeta <= 1.2 + 1e-9; zeta += 0.04) {
        const double f = objective(tau, mu, zeta);
        if (f < best_f) {
          best_f = f;
          best[0] = tau;
          best[1] = mu;
          best[2] = zeta;
        }
      }
    }
  }
  if (!std::isfinite(best_f))
    throw std::invalid_argument("collapse error undefined over the whole search grid");

  const bool converged = nelder_mead(objective, best, 400);

  ExponentSet result;
  result.tau = best[0];
  result.mu = best[1];
  result.zeta = best[2];
  result.collapse_error_lower =
      collapse_error_with(dists, xovers, best[0], best[1], best[2], Region::Lower);
  result.collapse_error_upper =
      collapse_error_with(dists, xovers, best[0], best[1], best[2], Region::Upper);
  result.relation_residual = check_scaling_relation(best[0], best[1], best[2]);
  result.converged = converged;
  return result;
}

double bump_mass(const BinnedDistribution& dist, const CrossoverEstimate& crossovers) {
  if (!(crossovers.s_c1 > 0.0 && crossovers.s_c2 > crossovers.s_c1))
    throw std::invalid_argument("bump_mass needs valid crossover scales");
  double mass = 0.0;
  for (std::size_t i = 0; i < dist.num_bins(); ++i) {
    const double lo = std::max(dist.bin_low(i), crossovers.s_c1);
    const double hi = std::min(dist.bin_high(i), crossovers.s_c2);
    if (hi > lo) mass += dist.density(i) * (hi - lo);
  }
  return mass;
}

PowerLawFit fit_crossover_scaling(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3)
    throw std::invalid_argument("crossover fit needs at least three scales");
  for (const auto& [x, y] : points)
    if (!(x > 0.0 && y > 0.0))
      throw std::invalid_argument("crossover fit needs strictly positive inputs");

  const auto n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    const double lx = std::log(x);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("degenerate scales in crossover fit");

  PowerLawFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.amplitude = std::exp(intercept);

  double ssr = 0.0;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - (intercept + fit.exponent * std::log(x));
    ssr += r * r;
  }
  const double sxx_centered = sxx - sx * sx / n;
  fit.exponent_stderr =
      points.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx_centered) : 0.0;
  return fit;
}

std::vector<MasterCurvePoint> master_curve(std::span<const BinnedDistribution> dists,
                                           double tau, double mu, double zeta, Region region) {
  const auto xovers = require_bumps(dists);
  std::vector<MasterCurvePoint> points;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const RescaledCurve curve = rescale(dists[i], xovers[i], tau, mu, zeta, region, false);
    for (std::size_t p = 0; p < curve.x.size(); ++p)
      points.push_back({std::pow(10.0, curve.x[p]), std::pow(10.0, curve.y[p]),
                        dists[i].meta().nodes});
  }
  std::sort(points.begin(), points.end(),
            [](const MasterCurvePoint& a, const MasterCurvePoint& b) { return a.x < b.x; });
  return points;
}

double log_log_slope(std::span<const MasterCurvePoint> points, double x_lo, double x_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::uint64_t n = 0;
  for (const auto& p : points) {
    if (p.x < x_lo || p.x > x_hi) continue;
    const double lx = std::log10(p.x);
    const double ly = std::log10(p.y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("too few points for slope fit");
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("degenerate x range in slope fit");
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

}  // namespace cascade
