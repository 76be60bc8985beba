#include "gbf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gbf/errors.hpp"

namespace gbf {

namespace {

// Gauss-Kronrod 7/15 nodes and weights (positive half; QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double safe_eval(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  return std::isfinite(y) ? y : 0.0;  // integrable endpoint spikes
}

struct Segment {
  double a, b, val, err;
};

void gk15(const std::function<double(double)>& f, double a, double b, double& val, double& err) {
  const double half = 0.5 * (b - a);
  const double center = 0.5 * (a + b);
  const double fc = safe_eval(f, center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double fv[7][2];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    fv[i][0] = safe_eval(f, center - dx);
    fv[i][1] = safe_eval(f, center + dx);
    const double sum = fv[i][0] + fv[i][1];
    resk += kWgk[i] * sum;
    if (i % 2 == 1) resg += kWg[i / 2] * sum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::abs(fv[i][0] - reskh) + std::abs(fv[i][1] - reskh));
  val = resk * half;
  err = std::abs((resk - resg) * half);
  resasc *= std::abs(half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double lo, double hi, double rtol,
                     int max_intervals) {
  QuadResult res;
  std::vector<Segment> segs;
  segs.reserve(static_cast<std::size_t>(max_intervals));
  Segment whole{lo, hi, 0.0, 0.0};
  gk15(f, lo, hi, whole.val, whole.err);
  res.evals = 15;
  segs.push_back(whole);
  auto by_err = [](const Segment& x, const Segment& y) { return x.err < y.err; };

  double total = whole.val;
  double err_total = whole.err;
  while (static_cast<int>(segs.size()) < max_intervals) {
    if (err_total <= rtol * std::abs(total) || err_total < 1e-300) break;
    std::pop_heap(segs.begin(), segs.end(), by_err);
    const Segment worst = segs.back();
    segs.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // can't split further
      segs.push_back(worst);
      std::push_heap(segs.begin(), segs.end(), by_err);
      break;
    }
    Segment left{worst.a, mid, 0.0, 0.0}, right{mid, worst.b, 0.0, 0.0};
    gk15(f, left.a, left.b, left.val, left.err);
    gk15(f, right.a, right.b, right.val, right.err);
    res.evals += 30;
    total += left.val + right.val - worst.val;
    err_total += left.err + right.err - worst.err;
    segs.push_back(left);
    std::push_heap(segs.begin(), segs.end(), by_err);
    segs.push_back(right);
    std::push_heap(segs.begin(), segs.end(), by_err);
  }

  // Recompute sums in interval order for a deterministic, drift-free result.
  std::sort(segs.begin(), segs.end(),
            [](const Segment& x, const Segment& y) { return x.a < y.a; });
  total = 0.0;
  err_total = 0.0;
  for (const Segment& s : segs) {
    total += s.val;
    err_total += s.err;
  }
  res.value = total;
  res.abs_err = err_total;
  res.converged = err_total <= rtol * std::abs(total) || err_total < 1e-300;
  return res;
}

double log_integrate_01(const std::function<double(double)>& phi, double rtol) {
  // Factor out the bulk maximum so exp() stays in range.
  double ref = -std::numeric_limits<double>::infinity();
  constexpr int kScan = 129;
  for (int i = 1; i < kScan; ++i) {
    const double t = static_cast<double>(i) / kScan;
    const double v = phi(t);
    if (std::isfinite(v) && v > ref) ref = v;
  }
  if (!std::isfinite(ref)) raise(errc::quadrature_nonconverged, "integrand has no finite values");
  auto f = [&](double t) { return std::exp(phi(t) - ref); };
  const QuadResult q = integrate(f, 0.0, 1.0, rtol);
  if (!q.converged)
    raise(errc::quadrature_nonconverged,
          "adaptive quadrature failed to reach rtol " + std::to_string(rtol));
  if (!(q.value > 0.0)) raise(errc::quadrature_nonconverged, "integral underflowed");
  return ref + std::log(q.value);
}

}  // namespace gbf
