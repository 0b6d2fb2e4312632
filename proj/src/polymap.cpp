#include "varpoly/polymap.hpp"

#include <cmath>

#include "varpoly/errors.hpp"

namespace varpoly {
namespace {

double power(double x, int e) {
    double p = 1.0;
    for (int k = 0; k < e; ++k) p *= x;
    return p;
}

// value of the monomial with exponent e_i reduced by drop_i (and e_j by
// drop_j), times the falling-factorial factors -- shared by d1/d2
double mono_eval(const Monomial& t, const Vec& x, int i = -1, int di = 0, int j = -1,
                 int dj = 0) {
    double v = t.coef;
    for (size_t k = 0; k < t.exp.size(); ++k) {
        int e = t.exp[k];
        if (static_cast<int>(k) == i) e -= di;
        if (static_cast<int>(k) == j) e -= dj;
        if (e < 0) return 0.0;
        v *= power(x[static_cast<int>(k)], e);
    }
    return v;
}

}  // namespace

double Polynomial::eval(const Vec& x) const {
    double s = 0;
    for (const Monomial& t : terms) s += mono_eval(t, x);
    return s;
}

double Polynomial::d1(const Vec& x, int i) const {
    double s = 0;
    for (const Monomial& t : terms) {
        int e = t.exp[static_cast<size_t>(i)];
        if (e == 0) continue;
        s += e * mono_eval(t, x, i, 1);
    }
    return s;
}

double Polynomial::d2(const Vec& x, int i, int j) const {
    double s = 0;
    for (const Monomial& t : terms) {
        int ei = t.exp[static_cast<size_t>(i)];
        int ej = t.exp[static_cast<size_t>(j)];
        if (i == j) {
            if (ei < 2) continue;
            s += ei * (ei - 1) * mono_eval(t, x, i, 2);
        } else {
            if (ei == 0 || ej == 0) continue;
            s += ei * ej * mono_eval(t, x, i, 1, j, 1);
        }
    }
    return s;
}

Vec PolyMap::eval(const Vec& x) const {
    Vec v(n_out);
    for (int k = 0; k < n_out; ++k) v[k] = comp[static_cast<size_t>(k)].eval(x);
    return v;
}

Mat PolyMap::jacobian(const Vec& x) const {
    Mat J(n_out, n_in);
    for (int k = 0; k < n_out; ++k)
        for (int i = 0; i < n_in; ++i) J(k, i) = comp[static_cast<size_t>(k)].d1(x, i);
    return J;
}

std::vector<Mat> PolyMap::hessian(const Vec& x) const {
    std::vector<Mat> H;
    H.reserve(static_cast<size_t>(n_out));
    for (int k = 0; k < n_out; ++k) {
        Mat Hk(n_in, n_in);
        for (int i = 0; i < n_in; ++i)
            for (int j = i; j < n_in; ++j) {
                double v = comp[static_cast<size_t>(k)].d2(x, i, j);
                Hk(i, j) = v;
                Hk(j, i) = v;
            }
        H.push_back(Hk);
    }
    return H;
}

Mat PolyMap::hessian_lambda(const Vec& x, const Vec& lambda) const {
    if (lambda.size() != n_out)
        throw PreconditionError("shape_mismatch", "multiplier length differs from map output");
    Mat H = Mat::Zero(n_in, n_in);
    std::vector<Mat> stack = hessian(x);
    for (int k = 0; k < n_out; ++k) H += lambda[k] * stack[static_cast<size_t>(k)];
    return H;
}

PolyMap PolyMap::identity(int n) {
    PolyMap map;
    map.n_in = n;
    map.n_out = n;
    for (int k = 0; k < n; ++k) {
        Polynomial p;
        p.nvars = n;
        Monomial t;
        t.exp.assign(static_cast<size_t>(n), 0);
        t.exp[static_cast<size_t>(k)] = 1;
        t.coef = 1.0;
        p.terms.push_back(t);
        map.comp.push_back(p);
    }
    return map;
}

PolyMap PolyMap::linear(const Mat& M) {
    PolyMap map;
    map.n_in = static_cast<int>(M.cols());
    map.n_out = static_cast<int>(M.rows());
    for (int k = 0; k < map.n_out; ++k) {
        Polynomial p;
        p.nvars = map.n_in;
        for (int i = 0; i < map.n_in; ++i) {
            if (M(k, i) == 0.0) continue;
            Monomial t;
            t.exp.assign(static_cast<size_t>(map.n_in), 0);
            t.exp[static_cast<size_t>(i)] = 1;
            t.coef = M(k, i);
            p.terms.push_back(t);
        }
        if (p.terms.empty()) {
            Monomial t;
            t.exp.assign(static_cast<size_t>(map.n_in), 0);
            t.coef = 0.0;
            p.terms.push_back(t);
        }
        map.comp.push_back(p);
    }
    return map;
}

FdReport fd_validate(const PolyMap& map, const Vec& x, double h) {
    if (!(h > 0)) throw PreconditionError("bad_step", "fd_validate needs h > 0");
    FdReport rep;
    Mat J = map.jacobian(x);
    for (int i = 0; i < map.n_in; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        Vec col = (map.eval(xp) - map.eval(xm)) / (2 * h);
        rep.jacobian_dev = std::max(rep.jacobian_dev, (col - J.col(i)).lpNorm<Eigen::Infinity>());
    }
    std::vector<Mat> H = map.hessian(x);
    for (int i = 0; i < map.n_in; ++i) {
        for (int j = 0; j < map.n_in; ++j) {
            Vec xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            Vec fd = (map.eval(xpp) - map.eval(xpm) - map.eval(xmp) + map.eval(xmm)) / (4 * h * h);
            for (int k = 0; k < map.n_out; ++k)
                rep.hessian_dev =
                    std::max(rep.hessian_dev, std::abs(fd[k] - H[static_cast<size_t>(k)](i, j)));
        }
    }
    return rep;
}

}  // namespace varpoly
