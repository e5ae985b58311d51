#include "nomabeam/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nomabeam::sdp {

namespace {
using Eigen::MatrixXd;
using Eigen::VectorXd;
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

int svec_dim(int order) { return order * (order + 1) / 2; }

VectorXd svec(const MatrixXd& S) {
    const int p = static_cast<int>(S.rows());
    VectorXd v(svec_dim(p));
    int idx = 0;
    for (int j = 0; j < p; ++j)
        for (int i = j; i < p; ++i)
            v(idx++) = (i == j) ? S(i, j) : kSqrt2 * S(i, j);
    return v;
}

MatrixXd smat(const VectorXd& v, int order) {
    MatrixXd S(order, order);
    int idx = 0;
    for (int j = 0; j < order; ++j)
        for (int i = j; i < order; ++i) {
            const double val = (i == j) ? v(idx) : v(idx) / kSqrt2;
            S(i, j) = val;
            S(j, i) = val;
            ++idx;
        }
    return S;
}

namespace {

struct BlockLayout {
    std::vector<int> psd_dims;
    std::vector<int> psd_offsets;  // into the svec coordinate vector
    int nonneg_offset = 0;
    int nonneg_dim = 0;
    int total = 0;
    double degree = 0.0;
};

BlockLayout make_layout(const StandardForm& p) {
    BlockLayout lay;
    lay.psd_dims = p.psd_dims;
    int off = 0;
    for (int d : p.psd_dims) {
        if (d < 1) throw std::invalid_argument("solve_sdp: PSD block order must be >= 1");
        lay.psd_offsets.push_back(off);
        off += svec_dim(d);
        lay.degree += d;
    }
    lay.nonneg_offset = off;
    lay.nonneg_dim = p.nonneg_dim;
    lay.total = off + p.nonneg_dim;
    lay.degree += p.nonneg_dim;
    return lay;
}

struct NtScaling {
    // Per PSD block: R with R' Z R = R^{-1} X R^{-T} = diag(lambda).
    std::vector<MatrixXd> R, Rinv, T;       // T = R R'
    std::vector<VectorXd> lambda_psd;
    VectorXd d;                              // nonneg: d = sqrt(x ./ z)
    VectorXd lambda_nonneg;                  // sqrt(x .* z)
};

class PsdIpm {
public:
    PsdIpm(const StandardForm& p, double tol, int max_iter)
        : prob_(p), lay_(make_layout(p)), tol_(tol), max_iter_(max_iter) {
        if (p.A.cols() != lay_.total || p.c.size() != lay_.total ||
            p.A.rows() != p.b.size())
            throw std::invalid_argument("solve_sdp: inconsistent problem dimensions");
        m_ = static_cast<int>(p.A.rows());
    }

    SolveInfo run() {
        SolveInfo info;
        const int n = lay_.total;

        const double scale = std::max(
            {10.0, prob_.b.lpNorm<Eigen::Infinity>(), prob_.c.lpNorm<Eigen::Infinity>()});
        x_ = identity_vec(scale);
        z_ = identity_vec(scale);
        y_ = VectorXd::Zero(m_);

        VectorXd rp(m_), rd(n);
        double mu = x_.dot(z_) / lay_.degree;

        for (iter_ = 0; iter_ < max_iter_; ++iter_) {
            rp = prob_.b - prob_.A * x_;
            rd = prob_.c - prob_.A.transpose() * y_ - z_;
            mu = x_.dot(z_) / lay_.degree;

            const double pobj = prob_.c.dot(x_);
            const double dobj = prob_.b.dot(y_);
            pres_ = rp.norm() / (1.0 + prob_.b.norm());
            dres_ = rd.norm() / (1.0 + prob_.c.norm());
            gap_ = std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj) + std::fabs(dobj));

            if (pres_ <= tol_ && dres_ <= tol_ && gap_ <= tol_)
                return finish(info, SolveStatus::Optimal);

            if (!compute_scaling()) return finish(info, SolveStatus::NumericalFailure);
            if (!factor_normal_matrix()) return finish(info, SolveStatus::NumericalFailure);

            // Predictor: complementarity target 0.
            VectorXd rc = jordan_sq_neg();  // -lambda o lambda (scaled coordinates)
            VectorXd dx(n), dy(m_), dz(n);
            solve_newton(rp, rd, rc, dx, dy, dz);

            const double ap_aff = 0.99 * max_step_primal(dx);
            const double ad_aff = 0.99 * max_step_dual(dz);
            const double mu_aff = (x_ + ap_aff * dx).dot(z_ + ad_aff * dz) / lay_.degree;
            double sigma = std::pow(mu_aff / mu, 3);
            sigma = std::clamp(sigma, 1e-8, 1.0);

            // Corrector with the Mehrotra cross term in scaled coordinates.
            VectorXd du = apply_w_invT(dx);
            VectorXd dw = apply_w(dz);
            rc = jordan_sq_neg() - jordan_product(du, dw);
            add_identity(rc, sigma * mu);
            solve_newton(rp, rd, rc, dx, dy, dz);

            const double ap = std::min(1.0, 0.99 * max_step_primal(dx));
            const double ad = std::min(1.0, 0.99 * max_step_dual(dz));
            x_ += ap * dx;
            y_ += ad * dy;
            z_ += ad * dz;
        }
        return finish(info, SolveStatus::IterLimit);
    }

private:
    VectorXd identity_vec(double scale) const {
        VectorXd v = VectorXd::Zero(lay_.total);
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            v.segment(lay_.psd_offsets[k], svec_dim(p)) =
                svec(scale * MatrixXd::Identity(p, p));
        }
        v.tail(lay_.nonneg_dim).setConstant(scale);
        return v;
    }

    void add_identity(VectorXd& v, double alpha) const {
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            int idx = lay_.psd_offsets[k];
            for (int j = 0; j < p; ++j) {
                v(idx) += alpha;  // diagonal entries lead each svec column chunk
                idx += p - j;
            }
        }
        v.tail(lay_.nonneg_dim).array() += alpha;
    }

    bool compute_scaling() {
        const size_t nb = lay_.psd_dims.size();
        nt_.R.assign(nb, MatrixXd());
        nt_.Rinv.assign(nb, MatrixXd());
        nt_.T.assign(nb, MatrixXd());
        nt_.lambda_psd.assign(nb, VectorXd());
        for (size_t k = 0; k < nb; ++k) {
            const int p = lay_.psd_dims[k];
            const MatrixXd X = smat(x_.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            const MatrixXd Z = smat(z_.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            Eigen::LLT<MatrixXd> lltx(X), lltz(Z);
            if (lltx.info() != Eigen::Success || lltz.info() != Eigen::Success)
                return false;
            const MatrixXd Lx = lltx.matrixL();
            const MatrixXd Lz = lltz.matrixL();
            Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Lx,
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);
            const VectorXd lam = svd.singularValues();
            if (lam.minCoeff() <= 0.0) return false;
            const VectorXd sq = lam.cwiseSqrt();
            // R' Z R = R^{-1} X R^{-T} = diag(lam)
            MatrixXd R = Lz.transpose().triangularView<Eigen::Upper>().solve(
                MatrixXd(svd.matrixU()));
            R = R * sq.asDiagonal();
            MatrixXd Rinv = sq.cwiseInverse().asDiagonal() *
                            svd.matrixU().transpose() * Lz.transpose();
            nt_.R[k] = R;
            nt_.Rinv[k] = Rinv;
            nt_.T[k] = R * R.transpose();
            nt_.lambda_psd[k] = lam;
        }
        nt_.d = (x_.tail(lay_.nonneg_dim).array() / z_.tail(lay_.nonneg_dim).array())
                    .sqrt();
        nt_.lambda_nonneg =
            (x_.tail(lay_.nonneg_dim).array() * z_.tail(lay_.nonneg_dim).array())
                .sqrt();
        return true;
    }

    // Scaled-space maps. W z = svec(R' Z R); W^{-T} x = svec(R^{-1} X R^{-T});
    // W' u = svec(R U R'); the quadratic scaling is T(.)T.
    VectorXd apply_w(const VectorXd& v) const { return apply_cfg(v, false); }
    VectorXd apply_w_invT(const VectorXd& v) const { return apply_cfg(v, true); }

    VectorXd apply_cfg(const VectorXd& v, bool inv) const {
        VectorXd out(lay_.total);
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            const MatrixXd V = smat(v.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            MatrixXd res = inv ? (nt_.Rinv[k] * V * nt_.Rinv[k].transpose()).eval()
                               : (nt_.R[k].transpose() * V * nt_.R[k]).eval();
            out.segment(lay_.psd_offsets[k], svec_dim(p)) = svec(res);
        }
        if (inv)
            out.tail(lay_.nonneg_dim) =
                v.tail(lay_.nonneg_dim).cwiseQuotient(nt_.d);
        else
            out.tail(lay_.nonneg_dim) = v.tail(lay_.nonneg_dim).cwiseProduct(nt_.d);
        return out;
    }

    VectorXd apply_wT(const VectorXd& v) const {
        VectorXd out(lay_.total);
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            const MatrixXd V = smat(v.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            out.segment(lay_.psd_offsets[k], svec_dim(p)) =
                svec(nt_.R[k] * V * nt_.R[k].transpose());
        }
        out.tail(lay_.nonneg_dim) = v.tail(lay_.nonneg_dim).cwiseProduct(nt_.d);
        return out;
    }

    VectorXd apply_quad(const VectorXd& v) const {  // T v T / d^2 v
        VectorXd out(lay_.total);
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            const MatrixXd V = smat(v.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            out.segment(lay_.psd_offsets[k], svec_dim(p)) =
                svec(nt_.T[k] * V * nt_.T[k]);
        }
        out.tail(lay_.nonneg_dim) =
            v.tail(lay_.nonneg_dim).cwiseProduct(nt_.d.cwiseAbs2());
        return out;
    }

    VectorXd jordan_sq_neg() const {  // -lambda o lambda
        VectorXd out = VectorXd::Zero(lay_.total);
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            out.segment(lay_.psd_offsets[k], svec_dim(p)) =
                svec(MatrixXd(-nt_.lambda_psd[k].cwiseAbs2().asDiagonal()));
        }
        out.tail(lay_.nonneg_dim) = -nt_.lambda_nonneg.cwiseAbs2();
        return out;
    }

    VectorXd jordan_product(const VectorXd& u, const VectorXd& v) const {
        VectorXd out(lay_.total);
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            const MatrixXd U = smat(u.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            const MatrixXd V = smat(v.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            out.segment(lay_.psd_offsets[k], svec_dim(p)) =
                svec(0.5 * (U * V + V * U));
        }
        out.tail(lay_.nonneg_dim) =
            u.tail(lay_.nonneg_dim).cwiseProduct(v.tail(lay_.nonneg_dim));
        return out;
    }

    VectorXd jordan_div_lambda(const VectorXd& rc) const {  // lambda \ rc
        VectorXd out(lay_.total);
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            MatrixXd RC = smat(rc.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            const VectorXd& lam = nt_.lambda_psd[k];
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) RC(i, j) = 2.0 * RC(i, j) / (lam(i) + lam(j));
            out.segment(lay_.psd_offsets[k], svec_dim(p)) = svec(RC);
        }
        out.tail(lay_.nonneg_dim) =
            rc.tail(lay_.nonneg_dim).cwiseQuotient(nt_.lambda_nonneg);
        return out;
    }

    bool factor_normal_matrix() {
        MatrixXd AT = prob_.A.transpose();
        MatrixXd TAT(lay_.total, m_);
        for (int r = 0; r < m_; ++r) TAT.col(r) = apply_quad(AT.col(r));
        MatrixXd M = prob_.A * TAT;
        M.diagonal().array() += 1e-12 * (1.0 + M.diagonal().maxCoeff());
        llt_.compute(M);
        if (llt_.info() != Eigen::Success) {
            M.diagonal().array() += 1e-8 * (1.0 + M.diagonal().maxCoeff());
            llt_.compute(M);
            if (llt_.info() != Eigen::Success) return false;
        }
        TAT_ = std::move(TAT);
        return true;
    }

    // Newton system: A dx = rp; A'dy + dz = rd; scaled complementarity
    // lambda o (W^{-T}dx + W dz) = rc.
    void solve_newton(const VectorXd& rp, const VectorXd& rd, const VectorXd& rc,
                      VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
        const VectorXd t = apply_wT(jordan_div_lambda(rc));
        const VectorXd rhs = rp - prob_.A * t + TAT_.transpose() * rd;
        dy = llt_.solve(rhs);
        dz = rd - prob_.A.transpose() * dy;
        dx = t - apply_quad(dz);
    }

    double max_step_primal(const VectorXd& dx) const {
        return max_step(x_, dx);
    }
    double max_step_dual(const VectorXd& dz) const {
        return max_step(z_, dz);
    }

    double max_step(const VectorXd& base, const VectorXd& dir) const {
        double alpha = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < lay_.psd_dims.size(); ++k) {
            const int p = lay_.psd_dims[k];
            const MatrixXd B = smat(base.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            const MatrixXd D = smat(dir.segment(lay_.psd_offsets[k], svec_dim(p)), p);
            Eigen::LLT<MatrixXd> llt(B);
            if (llt.info() != Eigen::Success) return 0.0;
            const MatrixXd L = llt.matrixL();
            MatrixXd S = L.triangularView<Eigen::Lower>().solve(D);
            S = L.triangularView<Eigen::Lower>().solve(S.transpose().eval());
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()),
                                                       Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues().minCoeff();
            if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
        }
        for (int i = 0; i < lay_.nonneg_dim; ++i) {
            const double b = base(lay_.nonneg_offset + i);
            const double d = dir(lay_.nonneg_offset + i);
            if (d < 0.0) alpha = std::min(alpha, -b / d);
        }
        return std::min(alpha, 1e8);
    }

    SolveInfo finish(SolveInfo& info, SolveStatus status) const {
        info.status = status;
        info.x = x_;
        info.y = y_;
        info.objective = prob_.c.dot(x_);
        info.dual_objective = prob_.b.dot(y_);
        info.iterations = iter_;
        info.primal_residual = pres_;
        info.dual_residual = dres_;
        info.rel_gap = gap_;
        return info;
    }

    const StandardForm& prob_;
    BlockLayout lay_;
    double tol_;
    int max_iter_;
    int m_ = 0;

    NtScaling nt_;
    Eigen::LLT<MatrixXd> llt_;
    MatrixXd TAT_;

    VectorXd x_, y_, z_;
    double pres_ = 0, dres_ = 0, gap_ = 0;
    int iter_ = 0;
};

}  // namespace

SolveInfo solve(const StandardForm& p, double tol, int max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_sdp: tol must be positive");
    PsdIpm ipm(p, tol, max_iter);
    return ipm.run();
}

}  // namespace nomabeam::sdp
