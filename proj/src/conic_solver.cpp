#include "nomabeam/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

namespace nomabeam {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
        case SolveStatus::DualInfeasible: return "DualInfeasible";
        case SolveStatus::IterLimit: return "IterLimit";
        case SolveStatus::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

namespace {

using Eigen::VectorXd;

struct SparseRow {
    std::vector<LinTerm> terms;
    double rhs = 0.0;
};

double row_dot(const SparseRow& row, const VectorXd& x) {
    double acc = 0.0;
    for (const LinTerm& t : row.terms) acc += t.coeff * x(t.var);
    return acc;
}

void row_axpy(const SparseRow& row, double alpha, VectorXd& out) {
    for (const LinTerm& t : row.terms) out(t.var) += alpha * t.coeff;
}

/// Homogeneous self-dual embedding over R+^l x SOC(q_1) x ... x SOC(q_ns),
/// patterned after the ECOS algorithm with dense reduced-KKT factorizations.
/// Internal convention: minimize c'x s.t. Ax = b, Gx + s = h, s in K.
class HsdSolver {
public:
    HsdSolver(const ConeProgram& prog, const SolverSettings& settings)
        : cfg_(settings) {
        n_ = prog.num_vars();
        if (n_ < 1) throw std::invalid_argument("solve: program has no variables");
        c_ = VectorXd::Zero(n_);
        for (int j = 0; j < n_; ++j) c_(j) = -prog.objective()[j];  // maximize -> minimize

        for (const auto& r : prog.eq_rows()) A_.push_back({r.terms, r.rhs});
        l_ = prog.num_nonneg_rows();
        for (const auto& r : prog.nonneg_rows()) G_.push_back({r.terms, r.rhs});
        for (const auto& blk : prog.soc_rows()) {
            soc_offsets_.push_back(static_cast<int>(G_.size()));
            soc_dims_.push_back(static_cast<int>(blk.size()));
            for (const auto& r : blk) G_.push_back({r.terms, r.rhs});
        }
        m_ = static_cast<int>(G_.size());
        p_ = static_cast<int>(A_.size());
        ns_ = static_cast<int>(soc_dims_.size());
        if (m_ < 1)
            throw std::invalid_argument("solve: program has no cone constraints");

        b_ = VectorXd::Zero(p_);
        for (int r = 0; r < p_; ++r) b_(r) = A_[r].rhs;
        h_ = VectorXd::Zero(m_);
        for (int r = 0; r < m_; ++r) h_(r) = G_[r].rhs;

        equilibrate();

        lp_w_ = VectorXd::Ones(l_);
        soc_eta2_.assign(ns_, 1.0);
        soc_v_.resize(ns_);
        for (int k = 0; k < ns_; ++k) {
            soc_v_[k] = VectorXd::Zero(soc_dims_[k]);
            soc_v_[k](0) = 1.0;  // 2 v v' - J = I
        }
    }

    SolveReport run() {
        SolveReport report;

        x_ = VectorXd::Zero(n_);
        y_ = VectorXd::Zero(p_);
        z_ = VectorXd::Zero(m_);
        s_ = VectorXd::Zero(m_);
        lambda_ = VectorXd::Zero(m_);
        tau_ = 1.0;
        kappa_ = 1.0;

        resx0_ = std::max(1.0, c_.norm());
        resy0_ = std::max(1.0, b_.norm());
        resz0_ = std::max(1.0, h_.norm());

        if (!factorize()) return finish(report, SolveStatus::NumericalFailure);

        // Initialization: x from argmin ||Gx - h|| s.t. Ax = b; (s, z) from the
        // two standard KKT solves, pushed into the cone interior.
        VectorXd dx1(n_), dy1(p_), dz1(m_);
        VectorXd dx2(n_), dy2(p_), dz2(m_);
        solve_kkt(VectorXd::Zero(n_), b_, h_, dx1, dy1, dz1);
        x_ = dx1;
        bring_to_cone(-dz1, s_);
        solve_kkt(-c_, VectorXd::Zero(p_), VectorXd::Zero(m_), dx2, dy2, dz2);
        y_ = dy2;
        bring_to_cone(dz2, z_);

        double pres_prev = std::numeric_limits<double>::max();
        Best best;
        SolveStatus code = SolveStatus::IterLimit;
        double step = 0.0;

        for (iter_ = 0; iter_ <= cfg_.max_iter; ++iter_) {
            compute_residuals();
            update_statistics();

            // Unreliable direction: primal residual exploded or gap went negative.
            if (iter_ > 0 && (pres_ > kSafeguard * pres_prev || gap_ < 0.0)) {
                restore_best(best);
                code = check_exit(true);
                if (code == SolveStatus::IterLimit) code = SolveStatus::NumericalFailure;
                break;
            }
            pres_prev = pres_;

            code = check_exit(false);
            if (code != SolveStatus::IterLimit) break;

            if (iter_ > 0 && step <= kStepMin) {
                restore_best(best);
                code = check_exit(true);
                if (code == SolveStatus::IterLimit) code = SolveStatus::NumericalFailure;
                break;
            }
            if (iter_ == cfg_.max_iter) {
                code = check_exit(true);
                if (code == SolveStatus::Optimal) code = SolveStatus::IterLimit;
                break;
            }
            if (std::isnan(pcost_)) {
                restore_best(best);
                code = SolveStatus::NumericalFailure;
                break;
            }

            if (!best.valid || is_better_than_best(best)) best.save(*this);

            if (!update_scalings() || !factorize()) {
                restore_best(best);
                code = check_exit(true);
                if (code == SolveStatus::IterLimit) code = SolveStatus::NumericalFailure;
                break;
            }

            solve_kkt(-c_, b_, h_, dx1, dy1, dz1);
            const double dtau_denom =
                kappa_ / tau_ - c_.dot(dx1) - b_.dot(dy1) - h_.dot(dz1);

            // Affine (predictor) direction.
            VectorXd bz_aff = s_ - rz_;
            solve_kkt(rx_, -ry_, bz_aff, dx2, dy2, dz2);
            const double dtau_aff =
                (rt_ - kappa_ + c_.dot(dx2) + b_.dot(dy2) + h_.dot(dz2)) / dtau_denom;
            dz2 += dtau_aff * dz1;

            VectorXd w_dz(m_), ds_by_w(m_);
            apply_w(dz2, w_dz);
            ds_by_w = -w_dz - lambda_;
            const double dkap_aff = -kappa_ - kappa_ / tau_ * dtau_aff;

            const double step_aff =
                line_search(ds_by_w, w_dz, tau_, dtau_aff, kappa_, dkap_aff);
            const double sigma =
                std::clamp(std::pow(1.0 - step_aff, 3), kSigmaMin, kSigmaMax);

            // Combined direction.
            VectorXd ds1(m_), ds2(m_);
            conic_product(lambda_, lambda_, ds1);
            conic_product(ds_by_w, w_dz, ds2);
            ds1 += ds2;
            add_identity(ds1, -sigma * mu_);
            conic_division(lambda_, ds1, ds_by_w);  // ds_by_w = lambda \ ds1
            apply_w(ds_by_w, ds1);                  // ds1 = W(lambda \ ds1)

            const double one_minus_sigma = 1.0 - sigma;
            VectorXd bz_comb = -one_minus_sigma * rz_ + ds1;
            solve_kkt(one_minus_sigma * rx_, -one_minus_sigma * ry_, bz_comb,
                      dx2, dy2, dz2);

            const double bkap = kappa_ * tau_ + dkap_aff * dtau_aff - sigma * mu_;
            const double dtau = (one_minus_sigma * rt_ - bkap / tau_ + c_.dot(dx2) +
                                 b_.dot(dy2) + h_.dot(dz2)) /
                                dtau_denom;
            dx2 += dtau * dx1;
            dy2 += dtau * dy1;
            dz2 += dtau * dz1;

            apply_w(dz2, w_dz);
            ds_by_w = -(ds_by_w + w_dz);
            const double dkap = -(bkap + kappa_ * dtau) / tau_;

            step = kGamma * line_search(ds_by_w, w_dz, tau_, dtau, kappa_, dkap);

            VectorXd ds(m_);
            apply_w(ds_by_w, ds);

            x_ += step * dx2;
            y_ += step * dy2;
            z_ += step * dz2;
            s_ += step * ds;
            kappa_ += step * dkap;
            tau_ += step * dtau;
        }

        return finish(report, code);
    }

private:
    static constexpr double kGamma = 0.99;
    static constexpr double kStepMin = 1e-6 * kGamma;
    static constexpr double kStepMax = 0.9995;
    static constexpr double kSigmaMin = 1e-4;
    static constexpr double kSigmaMax = 1.0;
    static constexpr double kSafeguard = 500.0;

    struct Best {
        bool valid = false;
        VectorXd x, y, z, s;
        double tau = 1.0, kappa = 1.0;
        double pres = 0, dres = 0, gap = 0, mu = 0, kapovert = 0;

        void save(const HsdSolver& w) {
            valid = true;
            x = w.x_; y = w.y_; z = w.z_; s = w.s_;
            tau = w.tau_; kappa = w.kappa_;
            pres = w.pres_; dres = w.dres_; gap = w.gap_; mu = w.mu_;
            kapovert = w.kappa_ / w.tau_;
        }
    };

    void restore_best(const Best& best) {
        if (!best.valid) return;
        x_ = best.x; y_ = best.y; z_ = best.z; s_ = best.s;
        tau_ = best.tau; kappa_ = best.kappa;
        compute_residuals();
        update_statistics();
    }

    bool is_better_than_best(const Best& best) const {
        return gap_ > 0.0 && best.gap > 0.0 && gap_ < best.gap &&
               pres_ > 0.0 && pres_ < best.pres &&
               dres_ > 0.0 && dres_ < best.dres &&
               kappa_ / tau_ < best.kapovert && mu_ < best.mu;
    }

    // --- data scaling ------------------------------------------------------

    void equilibrate() {
        col_eq_ = VectorXd::Ones(n_);
        rowA_eq_ = VectorXd::Ones(p_);
        rowG_eq_ = VectorXd::Ones(m_);

        auto sqrt_or_one = [](double v) { return v < 1e-6 ? 1.0 : std::sqrt(v); };

        for (int pass = 0; pass < cfg_.equil_iters; ++pass) {
            VectorXd cmax = VectorXd::Zero(n_);
            VectorXd ramax = VectorXd::Zero(p_);
            VectorXd rgmax = VectorXd::Zero(m_);
            for (int r = 0; r < p_; ++r)
                for (const LinTerm& t : A_[r].terms) {
                    const double a = std::fabs(t.coeff);
                    cmax(t.var) = std::max(cmax(t.var), a);
                    ramax(r) = std::max(ramax(r), a);
                }
            for (int r = 0; r < m_; ++r)
                for (const LinTerm& t : G_[r].terms) {
                    const double a = std::fabs(t.coeff);
                    cmax(t.var) = std::max(cmax(t.var), a);
                    rgmax(r) = std::max(rgmax(r), a);
                }
            // One scale per SOC block so cone membership is preserved.
            for (int k = 0; k < ns_; ++k) {
                const int off = soc_offsets_[k], dim = soc_dims_[k];
                const double total = rgmax.segment(off, dim).sum();
                rgmax.segment(off, dim).setConstant(total);
            }
            cmax = cmax.unaryExpr(sqrt_or_one);
            ramax = ramax.unaryExpr(sqrt_or_one);
            rgmax = rgmax.unaryExpr(sqrt_or_one);

            for (int r = 0; r < p_; ++r)
                for (LinTerm& t : A_[r].terms) t.coeff /= ramax(r) * cmax(t.var);
            for (int r = 0; r < m_; ++r)
                for (LinTerm& t : G_[r].terms) t.coeff /= rgmax(r) * cmax(t.var);

            col_eq_ = col_eq_.cwiseProduct(cmax);
            rowA_eq_ = rowA_eq_.cwiseProduct(ramax);
            rowG_eq_ = rowG_eq_.cwiseProduct(rgmax);
        }
        c_ = c_.cwiseQuotient(col_eq_);
        b_ = b_.cwiseQuotient(rowA_eq_);
        h_ = h_.cwiseQuotient(rowG_eq_);
    }

    // --- cone utilities ----------------------------------------------------

    void add_identity(VectorXd& v, double alpha) const {
        v.head(l_).array() += alpha;
        for (int k = 0; k < ns_; ++k) v(soc_offsets_[k]) += alpha;
    }

    void bring_to_cone(const VectorXd& r, VectorXd& out) const {
        double alpha = -0.99;
        for (int i = 0; i < l_; ++i)
            if (r(i) <= 0.0) alpha = std::max(alpha, -r(i));
        for (int k = 0; k < ns_; ++k) {
            const int off = soc_offsets_[k], dim = soc_dims_[k];
            const double res = r(off) - r.segment(off + 1, dim - 1).norm();
            if (res <= 0.0) alpha = std::max(alpha, -res);
        }
        out = r;
        add_identity(out, alpha + 1.0);
    }

    bool update_scalings() {
        for (int i = 0; i < l_; ++i) {
            if (s_(i) <= 0.0 || z_(i) <= 0.0) return false;
            lp_w_(i) = std::sqrt(s_(i) / z_(i));
        }
        for (int k = 0; k < ns_; ++k) {
            const int off = soc_offsets_[k], dim = soc_dims_[k];
            const double sres = s_(off) * s_(off) - s_.segment(off + 1, dim - 1).squaredNorm();
            const double zres = z_(off) * z_(off) - z_.segment(off + 1, dim - 1).squaredNorm();
            if (sres <= 0.0 || zres <= 0.0) return false;
            const double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
            VectorXd sbar = s_.segment(off, dim) / snorm;
            VectorXd zbar = z_.segment(off, dim) / znorm;
            soc_eta2_[k] = snorm / znorm;

            const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
            // wbar = (sbar + J zbar) / (2 gamma) has unit hyperbolic norm;
            // the scaling is W = eta (2 v v' - J) with v = (wbar + e) normalized.
            VectorXd v(dim);
            v(0) = (0.5 / gamma) * (sbar(0) + zbar(0)) + 1.0;
            v.tail(dim - 1) =
                (0.5 / gamma) * (sbar.tail(dim - 1) - zbar.tail(dim - 1));
            v /= std::sqrt(2.0 * v(0));
            soc_v_[k] = v;
        }
        apply_w(z_, lambda_);
        return true;
    }

    // out = W u (NT scaling, symmetric)
    void apply_w(const VectorXd& u, VectorXd& out) const {
        out.head(l_) = lp_w_.cwiseProduct(u.head(l_));
        for (int k = 0; k < ns_; ++k) {
            const int off = soc_offsets_[k], dim = soc_dims_[k];
            const VectorXd& v = soc_v_[k];
            const double eta = std::sqrt(soc_eta2_[k]);
            const double vu = v(0) * u(off) + v.tail(dim - 1).dot(u.segment(off + 1, dim - 1));
            out(off) = eta * (2.0 * v(0) * vu - u(off));
            out.segment(off + 1, dim - 1) =
                eta * (2.0 * vu * v.tail(dim - 1) + u.segment(off + 1, dim - 1));
        }
    }

    // out = W^{-1} u; W^{-1} = (1/eta) (2 (Jv)(Jv)' - J)
    void apply_w_inv(const VectorXd& u, VectorXd& out) const {
        out.head(l_) = u.head(l_).cwiseQuotient(lp_w_);
        for (int k = 0; k < ns_; ++k) {
            const int off = soc_offsets_[k], dim = soc_dims_[k];
            const VectorXd& v = soc_v_[k];
            const double eta = std::sqrt(soc_eta2_[k]);
            const double vju =
                v(0) * u(off) - v.tail(dim - 1).dot(u.segment(off + 1, dim - 1));
            out(off) = (2.0 * v(0) * vju - u(off)) / eta;
            out.segment(off + 1, dim - 1) =
                (-2.0 * vju * v.tail(dim - 1) + u.segment(off + 1, dim - 1)) / eta;
        }
    }

    void conic_product(const VectorXd& u, const VectorXd& v, VectorXd& out) const {
        out.head(l_) = u.head(l_).cwiseProduct(v.head(l_));
        for (int k = 0; k < ns_; ++k) {
            const int off = soc_offsets_[k], dim = soc_dims_[k];
            const double head = u.segment(off, dim).dot(v.segment(off, dim));
            out.segment(off + 1, dim - 1) = u(off) * v.segment(off + 1, dim - 1) +
                                            v(off) * u.segment(off + 1, dim - 1);
            out(off) = head;
        }
    }

    // out = u \ w (inverse of the Jordan product by u)
    void conic_division(const VectorXd& u, const VectorXd& w, VectorXd& out) const {
        out.head(l_) = w.head(l_).cwiseQuotient(u.head(l_));
        for (int k = 0; k < ns_; ++k) {
            const int off = soc_offsets_[k], dim = soc_dims_[k];
            const double u0 = u(off), w0 = w(off);
            const double rho = u0 * u0 - u.segment(off + 1, dim - 1).squaredNorm();
            const double zeta =
                u.segment(off + 1, dim - 1).dot(w.segment(off + 1, dim - 1));
            const double factor = (zeta / u0 - w0) / rho;
            const double head = (u0 * w0 - zeta) / rho;
            out.segment(off + 1, dim - 1) =
                factor * u.segment(off + 1, dim - 1) + w.segment(off + 1, dim - 1) / u0;
            out(off) = head;
        }
    }

    // Largest step keeping lambda + alpha*ds and lambda + alpha*dz in the cone
    // (both directions live in scaled space), also keeping tau, kappa positive.
    double line_search(const VectorXd& ds, const VectorXd& dz, double tau,
                       double dtau, double kap, double dkap) const {
        double alpha = 10.0;
        if (l_ > 0) {
            const double rhomin =
                (ds.head(l_).cwiseQuotient(lambda_.head(l_))).minCoeff();
            const double sigmin =
                (dz.head(l_).cwiseQuotient(lambda_.head(l_))).minCoeff();
            const double worst = std::min(rhomin, sigmin);
            if (worst < 0.0) alpha = 1.0 / (-worst);
        }
        if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
        if (dkap < 0.0) alpha = std::min(alpha, -kap / dkap);

        for (int k = 0; k < ns_; ++k) {
            const int off = soc_offsets_[k], dim = soc_dims_[k];
            const double lk2 = lambda_(off) * lambda_(off) -
                               lambda_.segment(off + 1, dim - 1).squaredNorm();
            if (lk2 <= 0.0) continue;
            const double lknorm = std::sqrt(lk2);
            VectorXd lkbar = lambda_.segment(off, dim) / lknorm;

            auto conic_bound = [&](const VectorXd& d) {
                const double lkbar_d =
                    lkbar(0) * d(off) -
                    lkbar.tail(dim - 1).dot(d.segment(off + 1, dim - 1));
                const double f = (lkbar_d + d(off)) / (lkbar(0) + 1.0);
                const double tail_norm =
                    ((d.segment(off + 1, dim - 1) - f * lkbar.tail(dim - 1)) / lknorm)
                        .norm();
                return tail_norm - lkbar_d / lknorm;
            };
            const double bound = std::max({0.0, conic_bound(ds), conic_bound(dz)});
            if (bound > 0.0) alpha = std::min(alpha, 1.0 / bound);
        }
        return std::clamp(alpha, 1e-6, kStepMax);
    }

    // --- KKT -----------------------------------------------------------------

    // M = G' W^{-2} G + reg I, Schur complement for the equality rows.
    bool factorize() {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_, n_);
        for (int r = 0; r < l_; ++r) {
            const double coeff = 1.0 / (lp_w_(r) * lp_w_(r));
            for (const LinTerm& ti : G_[r].terms)
                for (const LinTerm& tj : G_[r].terms)
                    if (tj.var <= ti.var)
                        M(ti.var, tj.var) += coeff * ti.coeff * tj.coeff;
        }
        for (int k = 0; k < ns_; ++k) {
            const int off = soc_offsets_[k], dim = soc_dims_[k];
            const VectorXd& v = soc_v_[k];
            // G'W^{-2}G = (1/eta^2) [4||v||^2 u u' - 2(u w' + w u') + G'G]
            // with u = G'(Jv) and w = G'v.
            VectorXd u = VectorXd::Zero(n_);
            VectorXd w = VectorXd::Zero(n_);
            for (int i = 0; i < dim; ++i) {
                const double vt_i = (i == 0) ? v(0) : -v(i);
                row_axpy(G_[off + i], vt_i, u);
                row_axpy(G_[off + i], v(i), w);
            }
            const double inv_eta2 = 1.0 / soc_eta2_[k];
            M.selfadjointView<Eigen::Lower>().rankUpdate(u, 4.0 * v.squaredNorm() *
                                                                inv_eta2);
            M.selfadjointView<Eigen::Lower>().rankUpdate(u, w, -2.0 * inv_eta2);
            for (int i = 0; i < dim; ++i)
                for (const LinTerm& ti : G_[off + i].terms)
                    for (const LinTerm& tj : G_[off + i].terms)
                        if (tj.var <= ti.var)
                            M(ti.var, tj.var) += inv_eta2 * ti.coeff * tj.coeff;
        }
        M.diagonal().array() += cfg_.static_reg;

        double reg = cfg_.static_reg;
        for (int attempt = 0;; ++attempt) {
            llt_.compute(M);
            if (llt_.info() == Eigen::Success) break;
            if (attempt >= 3) return false;
            reg = std::max(reg * 1e3, 1e-10);
            M.diagonal().array() += reg;
        }

        if (p_ > 0) {
            Eigen::MatrixXd At = Eigen::MatrixXd::Zero(n_, p_);
            for (int r = 0; r < p_; ++r)
                for (const LinTerm& t : A_[r].terms) At(t.var, r) += t.coeff;
            MinvAt_ = llt_.solve(At);
            Eigen::MatrixXd S = At.transpose() * MinvAt_;
            S.diagonal().array() += cfg_.static_reg;
            schur_llt_.compute(S);
            if (schur_llt_.info() != Eigen::Success) return false;
        }
        return true;
    }

    void kkt_solve_once(const VectorXd& bx, const VectorXd& by, const VectorXd& bz,
                        VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
        VectorXd w2bz(m_), tmp(m_);
        apply_w_inv(bz, tmp);
        apply_w_inv(tmp, w2bz);
        VectorXd v1 = bx;
        for (int r = 0; r < m_; ++r) row_axpy(G_[r], w2bz(r), v1);

        VectorXd dx0 = llt_.solve(v1);
        if (p_ > 0) {
            VectorXd Adx0(p_);
            for (int r = 0; r < p_; ++r) Adx0(r) = row_dot(A_[r], dx0);
            dy = schur_llt_.solve(Adx0 - by);
            dx = dx0 - MinvAt_ * dy;
        } else {
            dy.resize(0);
            dx = dx0;
        }
        VectorXd gxbz(m_);
        for (int r = 0; r < m_; ++r) gxbz(r) = row_dot(G_[r], dx) - bz(r);
        apply_w_inv(gxbz, tmp);
        apply_w_inv(tmp, dz);
    }

    void solve_kkt(const VectorXd& bx, const VectorXd& by, const VectorXd& bz,
                   VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
        kkt_solve_once(bx, by, bz, dx, dy, dz);
        for (int round = 0; round < cfg_.refine_steps; ++round) {
            // Residual of [0 A' G'; A 0 0; G 0 -W^2] [dx dy dz] = [bx by bz]
            VectorXd r1 = bx;
            for (int r = 0; r < p_; ++r) row_axpy(A_[r], -dy(r), r1);
            for (int r = 0; r < m_; ++r) row_axpy(G_[r], -dz(r), r1);
            VectorXd r2(p_);
            for (int r = 0; r < p_; ++r) r2(r) = by(r) - row_dot(A_[r], dx);
            VectorXd w2dz(m_), tmp(m_);
            apply_w(dz, tmp);
            apply_w(tmp, w2dz);
            VectorXd r3(m_);
            for (int r = 0; r < m_; ++r) r3(r) = bz(r) - (row_dot(G_[r], dx) - w2dz(r));

            VectorXd ex(n_), ey(p_), ez(m_);
            kkt_solve_once(r1, r2, r3, ex, ey, ez);
            dx += ex;
            if (p_ > 0) dy += ey;
            dz += ez;
        }
    }

    // --- residuals, statistics, exit tests -----------------------------------

    void compute_residuals() {
        rx_ = VectorXd::Zero(n_);
        for (int r = 0; r < m_; ++r) row_axpy(G_[r], -z_(r), rx_);
        for (int r = 0; r < p_; ++r) row_axpy(A_[r], -y_(r), rx_);
        hresx_ = rx_.norm();
        rx_ -= tau_ * c_;

        ry_.resize(p_);
        for (int r = 0; r < p_; ++r) ry_(r) = row_dot(A_[r], x_);
        hresy_ = ry_.norm();
        ry_ -= tau_ * b_;

        rz_.resize(m_);
        for (int r = 0; r < m_; ++r) rz_(r) = s_(r) + row_dot(G_[r], x_);
        hresz_ = rz_.norm();
        rz_ -= tau_ * h_;

        cx_ = c_.dot(x_);
        by_ = p_ > 0 ? b_.dot(y_) : 0.0;
        hz_ = h_.dot(z_);
        rt_ = kappa_ + cx_ + by_ + hz_;
    }

    void update_statistics() {
        gap_ = s_.dot(z_);
        mu_ = (gap_ + kappa_ * tau_) / (static_cast<double>(l_ + ns_) + 1.0);
        pcost_ = cx_ / tau_;
        dcost_ = -(hz_ + by_) / tau_;
        relgap_ = std::numeric_limits<double>::quiet_NaN();
        if (pcost_ < 0.0)
            relgap_ = gap_ / (-pcost_);
        else if (dcost_ > 0.0)
            relgap_ = gap_ / dcost_;

        const double nx = x_.norm(), ny = y_.norm(), nz = z_.norm(), ns = s_.norm();
        const double nry = p_ > 0 ? ry_.norm() / std::max(resy0_ + nx, 1.0) : 0.0;
        const double nrz = rz_.norm() / std::max(resz0_ + nx + ns, 1.0);
        pres_ = std::max(nry, nrz) / tau_;
        dres_ = rx_.norm() / std::max(resx0_ + ny + nz, 1.0) / tau_;

        pinfres_ = std::numeric_limits<double>::quiet_NaN();
        dinfres_ = std::numeric_limits<double>::quiet_NaN();
        if ((hz_ + by_) / std::max(ny + nz, 1.0) < -cfg_.tol)
            pinfres_ = hresx_ / std::max(ny + nz, 1.0);
        if (cx_ / std::max(nx, 1.0) < -cfg_.tol)
            dinfres_ =
                std::max(hresy_ / std::max(nx, 1.0), hresz_ / std::max(nx + ns, 1.0));
    }

    SolveStatus check_exit(bool reduced) const {
        const double feastol = reduced ? std::max(1e-4, 1e3 * cfg_.tol) : cfg_.tol;
        const double abstol = reduced ? std::max(5e-5, 1e3 * cfg_.tol) : cfg_.tol;
        const double reltol = reduced ? std::max(5e-5, 1e3 * cfg_.tol) : cfg_.tol;

        if ((-cx_ > 0.0 || -by_ - hz_ >= -abstol) && pres_ < feastol &&
            dres_ < feastol &&
            (gap_ < abstol || (!std::isnan(relgap_) && relgap_ < reltol)))
            return SolveStatus::Optimal;
        if (!std::isnan(dinfres_) && dinfres_ < feastol && tau_ < kappa_)
            return SolveStatus::DualInfeasible;
        if ((!std::isnan(pinfres_) && pinfres_ < feastol && tau_ < kappa_) ||
            (tau_ < feastol && kappa_ < feastol && pinfres_ < feastol))
            return SolveStatus::PrimalInfeasible;
        return SolveStatus::IterLimit;
    }

    SolveReport finish(SolveReport& report, SolveStatus code) {
        compute_residuals();
        update_statistics();
        report.status = code;
        report.iterations = iter_;
        // Undo homogenization and equilibration.
        const double tau = tau_ > 0 ? tau_ : 1.0;
        report.x = x_.cwiseQuotient(col_eq_) / tau;
        report.objective = -cx_ / tau;  // back to the maximize convention
        report.dual_objective = (hz_ + by_) / tau;
        report.primal_residual = pres_;
        report.dual_residual = dres_;
        report.rel_gap = std::isnan(relgap_) ? gap_ : relgap_;
        if (code == SolveStatus::PrimalInfeasible || code == SolveStatus::DualInfeasible)
            report.objective = std::numeric_limits<double>::quiet_NaN();
        return report;
    }

    SolverSettings cfg_;
    int n_ = 0, p_ = 0, m_ = 0, l_ = 0, ns_ = 0;
    VectorXd c_, b_, h_;
    std::vector<SparseRow> A_, G_;
    std::vector<int> soc_offsets_, soc_dims_;

    VectorXd col_eq_, rowA_eq_, rowG_eq_;

    VectorXd lp_w_;
    std::vector<double> soc_eta2_;
    std::vector<VectorXd> soc_v_;

    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::LLT<Eigen::MatrixXd> schur_llt_;
    Eigen::MatrixXd MinvAt_;

    VectorXd x_, y_, z_, s_, lambda_;
    double tau_ = 1.0, kappa_ = 1.0;
    VectorXd rx_, ry_, rz_;
    double hresx_ = 0, hresy_ = 0, hresz_ = 0;
    double cx_ = 0, by_ = 0, hz_ = 0, rt_ = 0;
    double gap_ = 0, mu_ = 0, pcost_ = 0, dcost_ = 0, relgap_ = 0;
    double pres_ = 0, dres_ = 0, pinfres_ = 0, dinfres_ = 0;
    double resx0_ = 1, resy0_ = 1, resz0_ = 1;
    int iter_ = 0;
};

}  // namespace

SolveReport solve(const ConeProgram& p, double tol, int max_iter) {
    SolverSettings settings;
    settings.tol = tol;
    settings.max_iter = max_iter;
    return solve(p, settings);
}

SolveReport solve(const ConeProgram& p, const SolverSettings& settings) {
    if (!(settings.tol > 0.0) || settings.tol > 1e-2)
        throw std::invalid_argument("solve: tol must lie in (0, 1e-2]");
    if (settings.max_iter < 1)
        throw std::invalid_argument("solve: max_iter must be positive");
    HsdSolver solver(p, settings);
    return solver.run();
}

}  // namespace nomabeam
