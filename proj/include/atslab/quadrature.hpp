#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace atslab {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;  // estimated
    int panels = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss (QUADPACK dqk15 constants).
inline constexpr double kGk15X[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGk15WK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15WG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F&& f, double a, double b, double* result, double* err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resg = fc * kGk15WG[3];
    double resk = fc * kGk15WK[7];
    double flo[7], fhi[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kGk15X[j];
        flo[j] = f(c - dx);
        fhi[j] = f(c + dx);
        const double fsum = flo[j] + fhi[j];
        resk += kGk15WK[j] * fsum;
        if (j % 2 == 1) resg += kGk15WG[j / 2] * fsum;
    }
    const double reskh = resk * 0.5;
    double resasc = kGk15WK[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kGk15WK[j] * (std::abs(flo[j] - reskh) + std::abs(fhi[j] - reskh));
    resasc *= std::abs(h);
    *result = resk * h;
    double e = std::abs((resk - resg) * h);
    if (resasc != 0.0 && e != 0.0)
        e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
    *err = e;
}

}  // namespace detail

// Globally adaptive GK15: keeps bisecting the worst panel until the summed
// error estimate meets max(abs_tol, rel_tol*|value|) or the panel budget runs out.
template <class F>
QuadResult integrate_gk(F&& f, double a, double b, double rel_tol = 1e-10,
                        double abs_tol = 0.0, int max_panels = 4000) {
    struct Panel {
        double a, b, value, err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<Panel> heap;
    double value, err;
    detail::gk15(f, a, b, &value, &err);
    heap.push({a, b, value, err});
    double total = value, total_err = err;
    int n = 1;
    while (n < max_panels) {
        const double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (total_err <= tol) break;
        Panel worst = heap.top();
        if (worst.err <= tol / std::max<std::size_t>(heap.size(), 1) * 0.01) break;
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted in fp
            heap.push({worst.a, worst.b, worst.value, 0.0});
            total_err -= worst.err;
            continue;
        }
        Panel left{worst.a, mid, 0, 0}, right{mid, worst.b, 0, 0};
        detail::gk15(f, left.a, left.b, &left.value, &left.err);
        detail::gk15(f, right.a, right.b, &right.value, &right.err);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    out.value = total;
    out.abs_error = total_err;
    out.panels = n;
    out.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total)) * 1.0001 + 1e-300;
    return out;
}

// Integrate over [pts[0], pts.back()] with mandatory interior breakpoints.
template <class F>
QuadResult integrate_segments(F&& f, std::span<const double> pts, double rel_tol = 1e-10,
                              double abs_tol = 0.0, int max_panels_per_seg = 2000) {
    QuadResult out;
    out.converged = true;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const QuadResult r = integrate_gk(f, pts[i], pts[i + 1], rel_tol,
                                          abs_tol / std::max<std::size_t>(pts.size() - 1, 1),
                                          max_panels_per_seg);
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.panels += r.panels;
        out.converged = out.converged && r.converged;
    }
    return out;
}

}  // namespace atslab
