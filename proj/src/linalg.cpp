#include "cyl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cyl/errors.hpp"

namespace cyl {

Mat Mat::operator*(const Mat& o) const {
    Mat r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < dim_; ++k) {
            Cplx aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < dim_; ++j) r(i, j) += aik * o(k, j);
        }
    return r;
}

Mat Mat::transpose() const {
    Mat r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

Mat Mat::conj_transpose() const {
    Mat r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

double Mat::frobenius() const {
    double s = 0;
    for (const Cplx& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double Mat::max_abs() const {
    double s = 0;
    for (const Cplx& z : a_) s = std::max(s, std::abs(z));
    return s;
}

bool Mat::finite() const {
    for (const Cplx& z : a_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

Mat inverse(const Mat& m) {
    int n = m.dim();
    Mat a = m, inv = Mat::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-300) throw NumericError("matrix inverse: singular");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        Cplx d = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            Cplx f = a(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

Cplx determinant(const Mat& m) {
    int n = m.dim();
    Mat a = m;
    Cplx det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) == 0.0) return 0.0;
        if (piv != col) {
            det = -det;
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
        }
        det *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            Cplx f = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

std::vector<Cplx> solve(const Mat& m, std::vector<Cplx> rhs) {
    int n = m.dim();
    Mat a = m;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-300) throw NumericError("solve: singular system");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(rhs[piv], rhs[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            Cplx f = a(r, col) / a(col, col);
            rhs[r] -= f * rhs[col];
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        for (int j = r + 1; j < n; ++j) rhs[r] -= a(r, j) * rhs[j];
        rhs[r] /= a(r, r);
    }
    return rhs;
}

std::vector<double> singular_values(const Mat& m) {
    if (!m.finite()) throw NumericError("singular_values: non-finite entries");
    int n = m.dim();
    Mat a = m;
    // one-sided Jacobi: rotate column pairs until pairwise orthogonal
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double app = 0, aqq = 0;
                Cplx apq = 0;
                for (int i = 0; i < n; ++i) {
                    app += std::norm(a(i, p));
                    aqq += std::norm(a(i, q));
                    apq += std::conj(a(i, p)) * a(i, q);
                }
                double r = std::abs(apq);
                if (r <= 1e-30 || r * r <= 1e-60 * app * aqq) continue;
                off = std::max(off, r / std::sqrt(app * aqq));
                // absorb the phase into column q, then a real Jacobi rotation
                Cplx phase = apq / r;
                double tau = (aqq - app) / (2.0 * r);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
                for (int i = 0; i < n; ++i) {
                    Cplx vp = a(i, p), vq = a(i, q) * std::conj(phase);
                    a(i, p) = c * vp - s * vq;
                    a(i, q) = s * vp + c * vq;
                }
            }
        if (off < 1e-15) break;
    }
    std::vector<double> sv(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += std::norm(a(i, j));
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

std::vector<double> singular_values_2x2_gram(const Mat& m) {
    // A^H A has char poly x^2 - F x + |det|^2, F = ||A||_F^2
    double f = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) f += std::norm(m(i, j));
    double d2 = std::norm(determinant(m));
    double disc = std::max(f * f - 4.0 * d2, 0.0);
    double smax2 = (f + std::sqrt(disc)) / 2.0;
    double smin2 = smax2 > 0 ? d2 / smax2 : 0.0;
    return {std::sqrt(smax2), std::sqrt(smin2)};
}

namespace {

// coefficients of det(xI - A), c[0] x^n + ... + c[n], c[0] = 1
std::vector<Cplx> char_poly(const Mat& a) {
    int n = a.dim();
    std::vector<Cplx> c(n + 1);
    c[0] = 1.0;
    Mat m = a;
    for (int k = 1; k <= n; ++k) {
        Cplx tr = 0.0;
        for (int i = 0; i < n; ++i) tr += m(i, i);
        c[k] = -tr / static_cast<double>(k);
        if (k == n) break;
        for (int i = 0; i < n; ++i) m(i, i) += c[k];
        m = a * m;
    }
    return c;
}

Cplx poly_eval(const std::vector<Cplx>& c, Cplx z) {
    Cplx v = 0.0;
    for (const Cplx& ck : c) v = v * z + ck;
    return v;
}

Cplx poly_deriv_eval(const std::vector<Cplx>& c, Cplx z) {
    int n = static_cast<int>(c.size()) - 1;
    Cplx v = 0.0;
    for (int i = 0; i < n; ++i) v = v * z + c[i] * static_cast<double>(n - i);
    return v;
}

std::vector<Cplx> durand_kerner(const std::vector<Cplx>& c) {
    int n = static_cast<int>(c.size()) - 1;
    double scale = 1.0;
    for (int i = 1; i <= n; ++i) scale = std::max(scale, std::pow(std::abs(c[i]), 1.0 / i));
    std::vector<Cplx> z(n);
    Cplx seed(0.4, 0.9);
    Cplx p = 1.0;
    for (int i = 0; i < n; ++i) {
        p *= seed;
        z[i] = p * scale;
    }
    for (int iter = 0; iter < 300; ++iter) {
        double delta = 0.0;
        for (int i = 0; i < n; ++i) {
            Cplx denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            if (std::abs(denom) < 1e-300) denom = 1e-300;
            Cplx step = poly_eval(c, z[i]) / denom;
            z[i] -= step;
            delta = std::max(delta, std::abs(step));
        }
        if (delta < 1e-14 * scale) break;
    }
    // Newton polish
    for (int i = 0; i < n; ++i)
        for (int it = 0; it < 3; ++it) {
            Cplx d = poly_deriv_eval(c, z[i]);
            if (std::abs(d) < 1e-300) break;
            z[i] -= poly_eval(c, z[i]) / d;
        }
    return z;
}

void sort_desc_modulus(std::vector<Cplx>& v) {
    std::sort(v.begin(), v.end(), [](const Cplx& x, const Cplx& y) {
        double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
}

}  // namespace

std::vector<Cplx> eigenvalues_qr(const Mat& m) {
    int n = m.dim();
    Mat a = m;
    // Householder reduction to upper Hessenberg
    for (int col = 0; col < n - 2; ++col) {
        double xnorm = 0;
        for (int i = col + 1; i < n; ++i) xnorm += std::norm(a(i, col));
        xnorm = std::sqrt(xnorm);
        if (xnorm < 1e-300) continue;
        Cplx x0 = a(col + 1, col);
        Cplx alpha = (std::abs(x0) > 0 ? -(x0 / std::abs(x0)) : Cplx(-1.0)) * xnorm;
        std::vector<Cplx> v(n, 0.0);
        v[col + 1] = x0 - alpha;
        for (int i = col + 2; i < n; ++i) v[i] = a(i, col);
        double vnorm2 = 0;
        for (int i = col + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
        if (vnorm2 < 1e-300) continue;
        // A <- (I - 2vv^H/v^Hv) A (I - 2vv^H/v^Hv)
        for (int j = 0; j < n; ++j) {
            Cplx s = 0;
            for (int i = col + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
            s *= 2.0 / vnorm2;
            for (int i = col + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (int i = 0; i < n; ++i) {
            Cplx s = 0;
            for (int j = col + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= 2.0 / vnorm2;
            for (int j = col + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
        }
    }
    // shifted QR with deflation, Givens-based
    std::vector<Cplx> eig;
    int hi = n - 1;
    int guard = 0;
    while (hi >= 0) {
        if (++guard > 200 * n) throw NumericError("eigenvalues: QR iteration stalled");
        if (hi == 0) {
            eig.push_back(a(0, 0));
            break;
        }
        // deflate
        bool deflated = false;
        for (int i = hi; i >= 1; --i) {
            double denom = std::abs(a(i - 1, i - 1)) + std::abs(a(i, i));
            if (std::abs(a(i, i - 1)) < 1e-16 * (denom > 0 ? denom : 1.0)) {
                a(i, i - 1) = 0.0;
                if (i == hi) {
                    eig.push_back(a(hi, hi));
                    --hi;
                    deflated = true;
                }
                break;
            }
        }
        if (deflated) continue;
        // Wilkinson shift from the trailing 2x2
        Cplx t00 = a(hi - 1, hi - 1), t01 = a(hi - 1, hi), t10 = a(hi, hi - 1), t11 = a(hi, hi);
        Cplx tr = t00 + t11, dt = t00 * t11 - t01 * t10;
        Cplx disc = std::sqrt(tr * tr - 4.0 * dt);
        Cplx mu1 = (tr + disc) / 2.0, mu2 = (tr - disc) / 2.0;
        Cplx shift = (std::abs(mu1 - t11) < std::abs(mu2 - t11)) ? mu1 : mu2;
        for (int i = 0; i <= hi; ++i) a(i, i) -= shift;
        // QR step on the active block via Givens rotations
        std::vector<std::array<Cplx, 2>> rot(hi);
        for (int i = 0; i < hi; ++i) {
            Cplx f = a(i, i), g = a(i + 1, i);
            double r = std::sqrt(std::norm(f) + std::norm(g));
            Cplx c = r > 0 ? f / r : Cplx(1.0), s = r > 0 ? g / r : Cplx(0.0);
            rot[i] = {c, s};
            for (int j = i; j <= hi; ++j) {
                Cplx x = a(i, j), y = a(i + 1, j);
                a(i, j) = std::conj(c) * x + std::conj(s) * y;
                a(i + 1, j) = -s * x + c * y;
            }
        }
        for (int i = 0; i < hi; ++i) {
            Cplx c = rot[i][0], s = rot[i][1];
            for (int j = 0; j <= hi; ++j) {
                Cplx x = a(j, i), y = a(j, i + 1);
                a(j, i) = x * c + y * s;
                a(j, i + 1) = -x * std::conj(s) + y * std::conj(c);
            }
        }
        for (int i = 0; i <= hi; ++i) a(i, i) += shift;
    }
    sort_desc_modulus(eig);
    return eig;
}

std::vector<Cplx> eigenvalues(const Mat& m) {
    if (!m.finite()) throw NumericError("eigenvalues: non-finite entries");
    int n = m.dim();
    if (n == 1) return {m(0, 0)};
    if (n == 2) {
        // stable quadratic: pick the sqrt branch aligned with the trace
        Cplx tr = m(0, 0) + m(1, 1);
        Cplx det = determinant(m);
        Cplx s = std::sqrt(tr * tr - 4.0 * det);
        if ((std::conj(tr) * s).real() < 0.0) s = -s;
        Cplx l1 = (tr + s) / 2.0;
        Cplx l2 = std::abs(l1) > 0 ? det / l1 : (tr - s) / 2.0;
        std::vector<Cplx> e{l1, l2};
        sort_desc_modulus(e);
        return e;
    }
    std::vector<Cplx> roots;
    if (n <= 4) {
        roots = durand_kerner(char_poly(m));
    } else {
        roots = eigenvalues_qr(m);
    }
    // residual check through the characteristic polynomial
    std::vector<Cplx> c = char_poly(m);
    double scale = std::max(1.0, m.max_abs());
    for (const Cplx& z : roots) {
        double pd = std::abs(poly_deriv_eval(c, z));
        double res = std::abs(poly_eval(c, z)) / std::max(pd, 1e-30);
        if (!(res < 1e-6 * scale))
            throw NumericError("eigenvalues: root residual " + std::to_string(res));
    }
    sort_desc_modulus(roots);
    return roots;
}

std::vector<Cplx> eigenvector(const Mat& m, Cplx lambda, double tol) {
    int n = m.dim();
    Mat shifted = m;
    // tiny relative shift keeps the solve nonsingular; inverse iteration
    double scale = std::max(1.0, m.max_abs());
    for (int i = 0; i < n; ++i) shifted(i, i) -= lambda * (1.0 + 1e-12) + Cplx(0, 1e-13 * scale);
    std::vector<Cplx> v(n);
    for (int i = 0; i < n; ++i) v[i] = Cplx(1.0 / std::sqrt(n + i + 1.0), 0.3 / (i + 1.0));
    for (int iter = 0; iter < 4; ++iter) {
        v = solve(shifted, std::move(v));
        double norm = 0;
        for (const Cplx& z : v) norm += std::norm(z);
        norm = std::sqrt(norm);
        if (norm < 1e-300) throw NumericError("eigenvector: inverse iteration collapsed");
        for (Cplx& z : v) z /= norm;
    }
    // phase normalization: first nonzero coordinate positive real
    for (int i = 0; i < n; ++i) {
        if (std::abs(v[i]) > 1e-10) {
            Cplx ph = std::abs(v[i]) / v[i];
            for (Cplx& z : v) z *= ph;
            break;
        }
    }
    double res = 0;
    for (int i = 0; i < n; ++i) {
        Cplx r = -lambda * v[i];
        for (int j = 0; j < n; ++j) r += m(i, j) * v[j];
        res += std::norm(r);
    }
    res = std::sqrt(res);
    if (!(res <= tol * scale))
        throw NumericError("eigenvector: residual " + std::to_string(res));
    return v;
}

std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> s) {
    int n = static_cast<int>(s.size());
    if (n == 0) return {};
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off += s[p][q] * s[p][q];
        if (off < 1e-28) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(s[p][q]) < 1e-300) continue;
                double tau = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
                double c = 1.0 / std::sqrt(1 + t * t), sn = c * t;
                for (int i = 0; i < n; ++i) {
                    double xp = s[i][p], xq = s[i][q];
                    s[i][p] = c * xp - sn * xq;
                    s[i][q] = sn * xp + c * xq;
                }
                for (int i = 0; i < n; ++i) {
                    double xp = s[p][i], xq = s[q][i];
                    s[p][i] = c * xp - sn * xq;
                    s[q][i] = sn * xp + c * xq;
                }
            }
    }
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) e[i] = s[i][i];
    std::sort(e.begin(), e.end());
    return e;
}

double sym_determinant(const std::vector<std::vector<double>>& s) {
    int n = static_cast<int>(s.size());
    if (n == 0) return 1.0;
    std::vector<std::vector<double>> a = s;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) == 0.0) return 0.0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (int j = col; j < n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return det;
}

std::vector<std::vector<double>> cholesky(std::vector<std::vector<double>> a) {
    int n = static_cast<int>(a.size());
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0) throw NumericError("cholesky: matrix not positive definite");
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return l;
}

std::vector<std::vector<double>> mat_inverse_spd(const std::vector<std::vector<double>>& a) {
    int n = static_cast<int>(a.size());
    Mat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a[i][j];
    Mat inv = inverse(m);
    std::vector<std::vector<double>> r(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i][j] = inv(i, j).real();
    return r;
}

}  // namespace cyl
