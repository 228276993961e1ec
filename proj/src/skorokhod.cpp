#include "bucksim/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <fmt/format.h>

#include "bucksim/errors.hpp"
#include "bucksim/parallel.hpp"

namespace bucksim {

double r_metric(const HybridState& a, const HybridState& b) {
    const double dx = a.x - b.x;
    const double dy = static_cast<double>(a.y - b.y);
    return std::sqrt(dx * dx + dy * dy);
}

// ---------------------------------------------------------------------------
// TimeDeformation

TimeDeformation::TimeDeformation(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)) {
    if (t_.size() < 2 || t_.size() != v_.size()) {
        throw DomainError("time deformation needs at least two matching knots");
    }
    if (t_.front() != 0.0 || v_.front() != 0.0) throw DomainError("time deformation must map 0 to 0");
    if (!(t_.back() > 0.0) || t_.back() != v_.back()) {
        throw DomainError(fmt::format("time deformation must map T onto itself (T = {}, lam(T) = {})", t_.back(),
                                      v_.back()));
    }
    for (std::size_t i = 1; i < t_.size(); ++i) {
        if (!(t_[i] > t_[i - 1]) || !(v_[i] > v_[i - 1])) {
            throw DomainError("time deformation knots must be strictly increasing");
        }
    }
    is_identity_ = t_ == v_;
}

TimeDeformation TimeDeformation::identity(double horizon) { return TimeDeformation({0.0, horizon}, {0.0, horizon}); }

namespace {

double piecewise_eval(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
    if (x == xs[i]) return ys[i];
    return ys[i] + (x - xs[i]) * (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
}

} // namespace

double TimeDeformation::operator()(double t) const { return is_identity_ ? t : piecewise_eval(t_, v_, t); }

double TimeDeformation::inverse(double s) const { return is_identity_ ? s : piecewise_eval(v_, t_, s); }

std::vector<double> TimeDeformation::slopes() const {
    std::vector<double> out(t_.size() - 1);
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) out[i] = (v_[i + 1] - v_[i]) / (t_[i + 1] - t_[i]);
    return out;
}

double TimeDeformation::gamma() const {
    double g = 0.0;
    for (double s : slopes()) g = std::max(g, std::abs(std::log(s)));
    return g;
}

double TimeDeformation::max_slope() const {
    const auto s = slopes();
    return *std::max_element(s.begin(), s.end());
}

double gamma(const TimeDeformation& lam) { return lam.gamma(); }

TimeDeformation compose(const TimeDeformation& outer, const TimeDeformation& inner) {
    if (outer.horizon() != inner.horizon()) throw DomainError("composed deformations need a common horizon");
    std::vector<double> ts = inner.knot_times();
    for (double s : outer.knot_times()) ts.push_back(inner.inverse(s));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    std::vector<double> kt;
    std::vector<double> kv;
    for (double t : ts) {
        const double v = outer(inner(t));
        // Preimages computed in floating point can collapse onto a neighbour.
        if (!kt.empty() && (t <= kt.back() || v <= kv.back())) continue;
        kt.push_back(t);
        kv.push_back(v);
    }
    kt.back() = inner.horizon();
    kv.back() = inner.horizon();
    return TimeDeformation(std::move(kt), std::move(kv));
}

// ---------------------------------------------------------------------------
// Deformation aligning a stochastic schedule with the deterministic one

std::optional<TimeDeformation> paper_lambda(const Schedule& det, const Schedule& stoch, double horizon) {
    if (!(horizon > 0.0) || det.initial_off_until || stoch.initial_off_until) return std::nullopt;
    if (det.cycles.size() != stoch.cycles.size()) return std::nullopt;

    std::vector<double> kt{0.0};
    std::vector<double> kv{0.0};
    auto push = [&](double t, double v) {
        if (t == kt.back() && v == kv.back()) return true;
        if (!(t > kt.back()) || !(v > kv.back())) return false;
        kt.push_back(t);
        kv.push_back(v);
        return true;
    };

    for (std::size_t n = 0; n < det.cycles.size(); ++n) {
        const Cycle& d = det.cycles[n];
        const Cycle& s = stoch.cycles[n];
        if (d.on_start != s.on_start) return std::nullopt;
        if (d.off_time.has_value() != s.off_time.has_value()) return std::nullopt;
        if (d.next_on.has_value() != s.next_on.has_value()) return std::nullopt;
        if (d.next_on && *d.next_on != *s.next_on) return std::nullopt;
        if (!push(d.on_start, s.on_start)) return std::nullopt;
        if (d.off_time && !push(*d.off_time, *s.off_time)) return std::nullopt;
        if (d.next_on && !push(*d.next_on, *s.next_on)) return std::nullopt;
    }
    if (!push(horizon, horizon)) return std::nullopt;
    if (kt.size() < 2) return std::nullopt;
    return TimeDeformation(std::move(kt), std::move(kv));
}

// ---------------------------------------------------------------------------
// Upper bounds

namespace {

void require_same_horizon(const HybridPath& z1, const HybridPath& z2, const TimeDeformation& lam) {
    const double T = z1.horizon();
    if (std::abs(z2.horizon() - T) > 1e-12 || std::abs(lam.horizon() - T) > 1e-12) {
        throw DomainError(fmt::format("horizon mismatch: {} / {} / {}", T, z2.horizon(), lam.horizon()));
    }
}

struct SupResult {
    double sup_r = 0.0;
    bool aligned = true;
};

void accumulate(SupResult& acc, const HybridPath& z1, const HybridPath& z2, const TimeDeformation& lam, double t) {
    const HybridState a = z1.at(t);
    const HybridState b = z2.at(lam(t));
    acc.sup_r = std::max(acc.sup_r, r_metric(a, b));
    if (a.y != b.y) acc.aligned = false;
}

} // namespace

DistanceBound sk_upper_bound(const HybridPath& z1, const HybridPath& z2, const TimeDeformation& lam, double grid_step,
                             std::string method) {
    require_same_horizon(z1, z2, lam);
    if (!(grid_step > 0.0)) throw ConfigError("grid step must be positive");
    const double T = z1.horizon();

    SupResult acc;
    const auto steps = static_cast<long>(std::ceil(T / grid_step - 1e-9));
    const double h = T / static_cast<double>(steps);
    for (long i = 0; i <= steps; ++i) accumulate(acc, z1, z2, lam, i == steps ? T : static_cast<double>(i) * h);
    for (double j : z1.jump_times()) accumulate(acc, z1, z2, lam, j);
    for (double j : z2.jump_times()) accumulate(acc, z1, z2, lam, lam.inverse(j));

    DistanceBound out;
    out.gamma = lam.gamma();
    out.sup_r = acc.sup_r;
    out.bound = std::max(out.gamma, out.sup_r);
    out.grid_modulus = 0.5 * h * (z1.lipschitz_bound() + z2.lipschitz_bound() * lam.max_slope());
    out.modes_aligned = acc.aligned;
    out.method = std::move(method);
    return out;
}

DistanceBound uniform_distance(const HybridPath& z1, const HybridPath& z2, double grid_step) {
    return sk_upper_bound(z1, z2, TimeDeformation::identity(z1.horizon()), grid_step, "identity");
}

// ---------------------------------------------------------------------------
// Brute-force search

namespace {

// Optimises the free knots of lam on one segment [a, b] -> [a2, b2] whose
// endpoints are pinned. The objective max(gamma, sup r) is a max over pieces,
// so each piece keeps a cached score and a knot move re-scores two pieces.
class SegmentSearch {
public:
    SegmentSearch(const HybridPath& z1, const HybridPath& z2, double a, double b, double a2, double b2,
                  const BruteForceOptions& opts)
        : z1_(z1), z2_(z2), opts_(opts) {
        const int k = std::max(1, opts.knots);
        u_.resize(k + 1);
        w_.resize(k + 1);
        for (int i = 0; i <= k; ++i) {
            const double f = static_cast<double>(i) / k;
            u_[i] = i == k ? b : a + f * (b - a);
            w_[i] = i == k ? b2 : a2 + f * (b2 - a2);
        }
        const auto steps = std::max(1L, static_cast<long>(std::ceil((b - a) / opts.grid_step - 1e-9)));
        h_ = (b - a) / static_cast<double>(steps);
        a_ = a;
        j1_ = z1.jump_times();
        j2_ = z2.jump_times();
        score_.resize(k);
        for (int i = 0; i < k; ++i) score_[i] = piece_score(i, w_[i], w_[i + 1]);
    }

    double value() const { return *std::max_element(score_.begin(), score_.end()); }

    void optimise() {
        const int k = static_cast<int>(u_.size()) - 1;
        const int m = std::max(2, opts_.slopes);
        double ratio = 1.5;
        for (int sweep = 0; sweep < opts_.max_sweeps && ratio - 1.0 > 1e-7; ++sweep) {
            bool improved = false;
            for (int i = 1; i < k; ++i) {
                const double du = u_[i] - u_[i - 1];
                const double base = (w_[i] - w_[i - 1]) / du;
                double best_w = w_[i];
                double best_left = score_[i - 1];
                double best_right = score_[i];
                double best = std::max(best_left, best_right);
                for (int j = 0; j < m; ++j) {
                    const double e = 2.0 * j / (m - 1) - 1.0;
                    const double w = w_[i - 1] + base * std::pow(ratio, e) * du;
                    if (!(w > w_[i - 1]) || !(w < w_[i + 1]) || w == w_[i]) continue;
                    const double left = piece_score(i - 1, w_[i - 1], w);
                    const double right = piece_score(i, w, w_[i + 1]);
                    if (std::max(left, right) < best - 1e-15) {
                        best = std::max(left, right);
                        best_w = w;
                        best_left = left;
                        best_right = right;
                    }
                }
                if (best_w != w_[i]) {
                    w_[i] = best_w;
                    score_[i - 1] = best_left;
                    score_[i] = best_right;
                    improved = true;
                }
            }
            if (!improved) ratio = std::sqrt(ratio);
        }
    }

    const std::vector<double>& times() const { return u_; }
    const std::vector<double>& values() const { return w_; }

private:
    // max(|log slope|, sup r) over piece i mapped [u_i, u_{i+1}] -> [wl, wr].
    double piece_score(int i, double wl, double wr) const {
        const double ul = u_[i];
        const double ur = u_[i + 1];
        const double slope = (wr - wl) / (ur - ul);
        double score = std::abs(std::log(slope));
        auto lam = [&](double t) { return t == ul ? wl : (t == ur ? wr : wl + (t - ul) * slope); };
        auto visit = [&](double t) { score = std::max(score, r_metric(z1_.at(t), z2_.at(lam(t)))); };

        visit(ul);
        auto j = static_cast<long>(std::floor((ul - a_) / h_)) + 1;
        for (double t = a_ + j * h_; t < ur; t = a_ + (++j) * h_) visit(t);
        for (double jt : j1_) {
            if (jt > ul && jt < ur) visit(jt);
        }
        for (double js : j2_) {
            if (js > wl && js < wr) visit(ul + (js - wl) / slope);
        }
        // Left limits at the right end: sample just inside the piece.
        const double t_in = ur - 1e-9 * std::max(1.0, ur);
        if (t_in > ul) visit(t_in);
        return score;
    }

    const HybridPath& z1_;
    const HybridPath& z2_;
    BruteForceOptions opts_;
    std::vector<double> u_;
    std::vector<double> w_;
    std::vector<double> score_;
    std::vector<double> j1_;
    std::vector<double> j2_;
    double a_ = 0.0;
    double h_ = 0.0;
};

struct Candidate {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> t;
    std::vector<double> v;
};

Candidate search_family(const HybridPath& z1, const HybridPath& z2, const std::vector<std::pair<double, double>>& anchors,
                        const BruteForceOptions& opts) {
    const std::size_t segs = anchors.size() - 1;
    std::vector<std::unique_ptr<SegmentSearch>> searches(segs);
    parallel_for(segs, opts.threads, [&](std::size_t s) {
        searches[s] = std::make_unique<SegmentSearch>(z1, z2, anchors[s].first, anchors[s + 1].first,
                                                      anchors[s].second, anchors[s + 1].second, opts);
        searches[s]->optimise();
    });

    Candidate c;
    c.value = 0.0;
    c.t.push_back(0.0);
    c.v.push_back(0.0);
    for (const auto& s : searches) {
        c.value = std::max(c.value, s->value());
        for (std::size_t i = 1; i < s->times().size(); ++i) {
            c.t.push_back(s->times()[i]);
            c.v.push_back(s->values()[i]);
        }
    }
    return c;
}

} // namespace

DistanceBound sk_bruteforce(const HybridPath& z1, const HybridPath& z2, const BruteForceOptions& opts) {
    const double T = z1.horizon();
    require_same_horizon(z1, z2, TimeDeformation::identity(T));
    const auto j1 = z1.jump_times();
    const auto j2 = z2.jump_times();
    if (T > 3.0 || j1.size() > 4 || j2.size() > 4) {
        throw DomainError(fmt::format("instance too large for brute force (T = {}, jumps {} / {})", T, j1.size(),
                                      j2.size()));
    }

    std::vector<std::vector<std::pair<double, double>>> families;
    families.push_back({{0.0, 0.0}, {T, T}});
    if (j1.size() == j2.size() && !j1.empty()) {
        std::vector<std::pair<double, double>> aligned{{0.0, 0.0}};
        bool valid = true;
        for (std::size_t i = 0; i < j1.size() && valid; ++i) {
            if ((j1[i] == T) != (j2[i] == T)) valid = false;
            if (j1[i] == T) continue;
            if (!(j1[i] > aligned.back().first) || !(j2[i] > aligned.back().second)) valid = false;
            aligned.emplace_back(j1[i], j2[i]);
        }
        aligned.emplace_back(T, T);
        if (valid) families.push_back(std::move(aligned));
    }

    // Ties keep the earlier family.
    Candidate best;
    for (const auto& anchors : families) {
        Candidate c = search_family(z1, z2, anchors, opts);
        if (c.value < best.value) best = std::move(c);
    }
    const TimeDeformation lam(std::move(best.t), std::move(best.v));
    DistanceBound out = sk_upper_bound(z1, z2, lam, opts.grid_step, "bruteforce");
    return out;
}

} // namespace bucksim
