#include "seqdet/state_space_model.hpp"

#include <cmath>
#include <unordered_map>

#include "seqdet/errors.hpp"

namespace seqdet {

namespace {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& k, const char* what) {
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigError(std::string(what) + " covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-10) throw ConfigError(std::string(what) + " covariance is not PSD");
        ev[i] = std::sqrt(std::max(ev[i], 0.0));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

class StateSpacePath final : public LlrPath {
public:
    StateSpacePath(const StateSpaceModel& model, std::size_t change_point,
                   std::size_t n_max, std::uint64_t seed)
        : model_(model), change_(change_point), n_max_(n_max), rng_(seed) {
        theta_ = Eigen::VectorXd::Zero(model_.dim());
        filter_ = model_.initial_filter_state();
    }

    LlrCapability capability() const override { return LlrCapability::ChangePointDependent; }
    std::size_t length() const override { return n_max_; }

    double step(std::size_t k, std::size_t n) override {
        ensure(n);
        auto [it, inserted] = contributions_.try_emplace(k);
        PerChangePoint& cache = it->second;
        if (inserted) {
            cache.state_shift = Eigen::VectorXd::Zero(model_.dim());
            cache.estimate_shift = Eigen::VectorXd::Zero(model_.dim());
        }
        while (cache.profile.size() < n - k + 1) {
            std::size_t i = k + cache.profile.size();  // absolute time of next entry
            cache.state_shift = model_.transition() * cache.state_shift + model_.nu_theta();
            Eigen::VectorXd delta =
                cache.state_shift + model_.nu_x() - model_.transition() * cache.estimate_shift;
            cache.estimate_shift =
                model_.transition() * cache.estimate_shift + gains_[i - 1] * delta;
            Eigen::VectorXd w = sigma_inv_[i - 1] * delta;
            cache.profile.push_back(w.dot(innovations_[i - 1]) - 0.5 * w.dot(delta));
        }
        return cache.profile[n - k];
    }

    double observation_scalar(std::size_t n) override {
        ensure(n);
        return observations_[n - 1][0];
    }

private:
    void ensure(std::size_t n) {
        const std::size_t m = model_.dim();
        while (observations_.size() < n) {
            std::size_t i = observations_.size() + 1;
            Eigen::VectorXd w(m), v(m);
            for (std::size_t j = 0; j < m; ++j) w[j] = rng_.gaussian();
            for (std::size_t j = 0; j < m; ++j) v[j] = rng_.gaussian();
            theta_ = model_.transition() * theta_ + model_.state_noise_sampler() * w;
            if (i >= change_) theta_ += model_.nu_theta();
            Eigen::VectorXd x = theta_ + model_.obs_noise_sampler() * v;
            if (i >= change_) x += model_.nu_x();
            observations_.push_back(x);

            filter_ = model_.kalman_step(filter_, x);
            innovations_.push_back(filter_.innovation);
            gains_.push_back(filter_.gain);
            sigma_inv_.push_back(filter_.innovation_cov.inverse());
        }
    }

    struct PerChangePoint {
        Eigen::VectorXd state_shift;     // mean shift of theta, initialized at k-1
        Eigen::VectorXd estimate_shift;  // induced shift of the filter estimate
        std::vector<double> profile;     // per-step LLR contributions from time k on
    };

    const StateSpaceModel& model_;
    std::size_t change_;
    std::size_t n_max_;
    Rng rng_;
    Eigen::VectorXd theta_;
    KalmanState filter_;
    std::vector<Eigen::VectorXd> observations_;
    std::vector<Eigen::VectorXd> innovations_;
    std::vector<Eigen::MatrixXd> gains_;
    std::vector<Eigen::MatrixXd> sigma_inv_;
    std::unordered_map<std::size_t, PerChangePoint> contributions_;
};

}  // namespace

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd transition, Eigen::MatrixXd state_noise_cov,
                                 Eigen::MatrixXd obs_noise_cov, Eigen::VectorXd nu_theta,
                                 Eigen::VectorXd nu_x)
    : transition_(std::move(transition)),
      state_noise_cov_(std::move(state_noise_cov)),
      obs_noise_cov_(std::move(obs_noise_cov)),
      nu_theta_(std::move(nu_theta)),
      nu_x_(std::move(nu_x)) {
    const Eigen::Index m = transition_.rows();
    if (transition_.cols() != m) throw ConfigError("state transition matrix must be square");
    if (state_noise_cov_.rows() != m || state_noise_cov_.cols() != m ||
        obs_noise_cov_.rows() != m || obs_noise_cov_.cols() != m)
        throw ConfigError("covariance dimensions must match the state dimension");
    if (nu_theta_.size() != m || nu_x_.size() != m)
        throw ConfigError("change intensity dimensions must match the state dimension");
    state_noise_sampler_ = psd_sqrt(state_noise_cov_, "state noise");
    obs_noise_sampler_ = psd_sqrt(obs_noise_cov_, "observation noise");
    // Sigma_1 = K_W + K_V must be invertible for the innovations to exist.
    Eigen::MatrixXd sigma1 = state_noise_cov_ + obs_noise_cov_;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma1);
    if (llt.info() != Eigen::Success)
        throw ConfigError("K_W + K_V is singular: innovation covariance not positive definite");
    drift_ = compute_drift();
}

KalmanState StateSpaceModel::initial_filter_state() const {
    KalmanState s;
    s.estimate = Eigen::VectorXd::Zero(transition_.rows());
    s.covariance = Eigen::MatrixXd::Zero(transition_.rows(), transition_.cols());
    return s;
}

KalmanState StateSpaceModel::kalman_step(const KalmanState& prev,
                                         const Eigen::VectorXd& x_n) const {
    KalmanState s;
    Eigen::VectorXd pred = transition_ * prev.estimate;
    Eigen::MatrixXd p_pred =
        transition_ * prev.covariance * transition_.transpose() + state_noise_cov_;
    s.innovation_cov = p_pred + obs_noise_cov_;
    s.gain = p_pred * s.innovation_cov.inverse();
    s.innovation = x_n - pred;
    s.estimate = pred + s.gain * s.innovation;
    s.covariance =
        (Eigen::MatrixXd::Identity(p_pred.rows(), p_pred.cols()) - s.gain) * p_pred;
    return s;
}

void StateSpaceModel::riccati_pass(std::size_t n_max, std::vector<Eigen::MatrixXd>& sigma,
                                   std::vector<Eigen::MatrixXd>& gain) const {
    sigma.clear();
    gain.clear();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(transition_.rows(), transition_.cols());
    for (std::size_t i = 1; i <= n_max; ++i) {
        Eigen::MatrixXd p_pred = transition_ * p * transition_.transpose() + state_noise_cov_;
        Eigen::MatrixXd s = p_pred + obs_noise_cov_;
        Eigen::MatrixXd k = p_pred * s.inverse();
        p = (Eigen::MatrixXd::Identity(p_pred.rows(), p_pred.cols()) - k) * p_pred;
        sigma.push_back(std::move(s));
        gain.push_back(std::move(k));
    }
}

std::vector<Eigen::VectorXd> StateSpaceModel::innovation_shift_profile(
    std::size_t k, std::size_t n_max) const {
    if (k == 0 || k > n_max) throw ConfigError("innovation_shift_profile requires 1 <= k <= n_max");
    std::vector<Eigen::MatrixXd> sigma, gain;
    riccati_pass(n_max, sigma, gain);
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd s = Eigen::VectorXd::Zero(transition_.rows());
    Eigen::VectorXd shat = Eigen::VectorXd::Zero(transition_.rows());
    for (std::size_t i = k; i <= n_max; ++i) {
        s = transition_ * s + nu_theta_;
        Eigen::VectorXd delta = s + nu_x_ - transition_ * shat;
        shat = transition_ * shat + gain[i - 1] * delta;
        out.push_back(delta);
    }
    return out;
}

double StateSpaceModel::compute_drift() const {
    // Deterministic recursion: per-step information (1/2) delta^T Sigma^{-1} delta
    // converges as the Riccati recursion and the shift profile reach steady state.
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(transition_.rows(), transition_.cols());
    Eigen::VectorXd s = Eigen::VectorXd::Zero(transition_.rows());
    Eigen::VectorXd shat = Eigen::VectorXd::Zero(transition_.rows());
    double prev = -1.0;
    const std::size_t max_iter = 100000;
    for (std::size_t i = 1; i <= max_iter; ++i) {
        Eigen::MatrixXd p_pred = transition_ * p * transition_.transpose() + state_noise_cov_;
        Eigen::MatrixXd sig = p_pred + obs_noise_cov_;
        Eigen::MatrixXd k = p_pred * sig.inverse();
        p = (Eigen::MatrixXd::Identity(p_pred.rows(), p_pred.cols()) - k) * p_pred;

        s = transition_ * s + nu_theta_;
        Eigen::VectorXd delta = s + nu_x_ - transition_ * shat;
        shat = transition_ * shat + k * delta;

        double c = 0.5 * delta.dot(sig.llt().solve(delta));
        if (i > 10 && std::abs(c - prev) <= 1e-12 * std::max(std::abs(c), 1e-300)) return c;
        prev = c;
    }
    return prev;
}

std::unique_ptr<LlrPath> StateSpaceModel::sample_path(std::size_t change_point,
                                                      std::size_t n_max,
                                                      std::uint64_t seed) const {
    return std::make_unique<StateSpacePath>(*this, change_point, n_max, seed);
}

}  // namespace seqdet
