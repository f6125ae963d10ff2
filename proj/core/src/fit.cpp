#include <algorithm>
#include <cmath>

#include "geoamp/errors.hpp"
#include "geoamp/oscillatory.hpp"

namespace geoamp {

DecayFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("loglog_fit: size mismatch");
  if (n < 3) throw FitDegenerate("loglog_fit: fewer than 3 samples");
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw FitDegenerate("loglog_fit: non-positive sample");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 1e-12)) throw FitDegenerate("loglog_fit: abscissae do not spread");
  DecayFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - f.intercept - f.slope * lx[i];
    rss += r * r;
  }
  f.residual_rms = std::sqrt(rss / n);
  f.stderr_slope = std::sqrt(rss / (n - 2) / sxx);
  f.samples = n;
  return f;
}

DecayFit fit_decay(const DecaySeries& series, DecayModel model, double n_align) {
  if (series.s.size() < 6) throw FitDegenerate("fit_decay: needs at least 6 samples");
  const auto [lo, hi] = std::minmax_element(series.s.begin(), series.s.end());
  if (*hi < 10.0 * *lo * (1 - 1e-12)) throw FitDegenerate("fit_decay: samples span less than a decade");
  std::vector<double> y = series.magnitude;
  if (model == DecayModel::power_times_sqrt)
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= std::sqrt(1.0 + series.s[i] * n_align);
  return loglog_fit(series.s, y);
}

}  // namespace geoamp
