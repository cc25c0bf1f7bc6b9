#include "hcnet/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include "hcnet/error.hpp"

namespace hcnet {

void SparseGenerator::add_rate(int from, int to, double rate) {
    if (from == to || rate == 0.0) return;
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw Error(ErrorCode::NumericFailure, "invalid rate " + std::to_string(rate));
    auto& row = out_.at(static_cast<std::size_t>(from));
    for (auto& tr : row) {
        if (tr.to == to) {
            tr.rate += rate;
            return;
        }
    }
    row.push_back({to, rate});
}

double SparseGenerator::exit_rate(int from) const {
    double s = 0.0;
    for (const auto& tr : transitions(from)) s += tr.rate;
    return s;
}

double SparseGenerator::max_exit_rate() const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i) m = std::max(m, exit_rate(i));
    return m;
}

namespace {

std::vector<char> reachable_from(const SparseGenerator& gen, int source, std::span<const char> targets) {
    std::vector<char> seen(static_cast<std::size_t>(gen.size()), 0);
    std::deque<int> queue{source};
    seen[static_cast<std::size_t>(source)] = 1;
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        if (targets[static_cast<std::size_t>(x)]) continue;
        for (const auto& tr : gen.transitions(x)) {
            if (!seen[static_cast<std::size_t>(tr.to)]) {
                seen[static_cast<std::size_t>(tr.to)] = 1;
                queue.push_back(tr.to);
            }
        }
    }
    return seen;
}

struct Row {
    std::vector<Transition> out;
    std::vector<int> preds;
    double reward = 0.0;
};

void add_to(std::vector<Transition>& row, int to, double rate) {
    for (auto& tr : row) {
        if (tr.to == to) {
            tr.rate += rate;
            return;
        }
    }
    row.push_back({to, rate});
}

void remove_pred(std::vector<int>& preds, int x) {
    auto it = std::find(preds.begin(), preds.end(), x);
    if (it != preds.end()) {
        *it = preds.back();
        preds.pop_back();
    }
}

}  // namespace

double expected_reward_until_hit(const SparseGenerator& gen, int source, std::span<const char> targets,
                                 std::span<const double> reward) {
    const int n = gen.size();
    if (source < 0 || source >= n) throw Error(ErrorCode::Unreachable, "source out of range");
    if (static_cast<int>(targets.size()) != n || static_cast<int>(reward.size()) != n)
        throw Error(ErrorCode::NumericFailure, "target/reward size mismatch");
    if (targets[static_cast<std::size_t>(source)]) return 0.0;

    const auto seen = reachable_from(gen, source, targets);
    bool any_target = false;
    for (int x = 0; x < n; ++x) any_target |= (seen[static_cast<std::size_t>(x)] && targets[static_cast<std::size_t>(x)]);
    if (!any_target) throw Error(ErrorCode::Unreachable, "no target state reachable from source");

    // Every reachable transient state must be able to reach a target, otherwise
    // the hitting time is infinite with positive probability.
    std::vector<std::vector<int>> reverse(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
        if (!seen[static_cast<std::size_t>(x)] || targets[static_cast<std::size_t>(x)]) continue;
        for (const auto& tr : gen.transitions(x)) reverse[static_cast<std::size_t>(tr.to)].push_back(x);
    }
    std::vector<char> coreach(static_cast<std::size_t>(n), 0);
    std::deque<int> queue;
    for (int x = 0; x < n; ++x) {
        if (seen[static_cast<std::size_t>(x)] && targets[static_cast<std::size_t>(x)]) {
            coreach[static_cast<std::size_t>(x)] = 1;
            queue.push_back(x);
        }
    }
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        for (int p : reverse[static_cast<std::size_t>(x)]) {
            if (!coreach[static_cast<std::size_t>(p)]) {
                coreach[static_cast<std::size_t>(p)] = 1;
                queue.push_back(p);
            }
        }
    }
    for (int x = 0; x < n; ++x) {
        if (seen[static_cast<std::size_t>(x)] && !coreach[static_cast<std::size_t>(x)])
            throw Error(ErrorCode::Unreachable, "state " + std::to_string(x) + " cannot reach the target set");
    }

    std::vector<Row> rows(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
        if (!seen[static_cast<std::size_t>(x)] || targets[static_cast<std::size_t>(x)]) continue;
        auto& row = rows[static_cast<std::size_t>(x)];
        row.reward = reward[static_cast<std::size_t>(x)];
        for (const auto& tr : gen.transitions(x)) {
            row.out.push_back(tr);
            if (!targets[static_cast<std::size_t>(tr.to)]) rows[static_cast<std::size_t>(tr.to)].preds.push_back(x);
        }
    }

    // Greedy minimum-degree elimination of every transient state but the source.
    auto degree = [&](int x) {
        const auto& r = rows[static_cast<std::size_t>(x)];
        return r.out.size() + r.preds.size();
    };
    std::set<std::pair<std::size_t, int>> order;
    std::vector<std::size_t> key(static_cast<std::size_t>(n), 0);
    for (int x = 0; x < n; ++x) {
        if (x == source || !seen[static_cast<std::size_t>(x)] || targets[static_cast<std::size_t>(x)]) continue;
        key[static_cast<std::size_t>(x)] = degree(x);
        order.insert({key[static_cast<std::size_t>(x)], x});
    }
    auto refresh = [&](int x) {
        if (x == source) return;
        order.erase({key[static_cast<std::size_t>(x)], x});
        key[static_cast<std::size_t>(x)] = degree(x);
        order.insert({key[static_cast<std::size_t>(x)], x});
    };

    while (!order.empty()) {
        const int z = order.begin()->second;
        order.erase(order.begin());
        Row zrow = std::move(rows[static_cast<std::size_t>(z)]);
        double qz = 0.0;
        for (const auto& tr : zrow.out) qz += tr.rate;
        if (!(qz > 0.0)) throw Error(ErrorCode::Singular, "state " + std::to_string(z) + " has no exit");

        for (const auto& tr : zrow.out)
            if (!targets[static_cast<std::size_t>(tr.to)]) remove_pred(rows[static_cast<std::size_t>(tr.to)].preds, z);

        for (int x : zrow.preds) {
            auto& xrow = rows[static_cast<std::size_t>(x)];
            double rxz = 0.0;
            for (auto it = xrow.out.begin(); it != xrow.out.end(); ++it) {
                if (it->to == z) {
                    rxz = it->rate;
                    *it = xrow.out.back();
                    xrow.out.pop_back();
                    break;
                }
            }
            const double w = rxz / qz;
            xrow.reward += w * zrow.reward;
            for (const auto& tr : zrow.out) {
                if (tr.to == x) continue;  // self-loop: dropped, exit rate recomputed from the remaining row
                const bool is_new_pred = !targets[static_cast<std::size_t>(tr.to)] &&
                                         std::none_of(xrow.out.begin(), xrow.out.end(),
                                                      [&](const Transition& t) { return t.to == tr.to; });
                add_to(xrow.out, tr.to, w * tr.rate);
                if (is_new_pred) rows[static_cast<std::size_t>(tr.to)].preds.push_back(x);
            }
        }
        for (int x : zrow.preds) refresh(x);
        for (const auto& tr : zrow.out)
            if (!targets[static_cast<std::size_t>(tr.to)]) refresh(tr.to);
    }

    const auto& srow = rows[static_cast<std::size_t>(source)];
    double qs = 0.0;
    for (const auto& tr : srow.out) qs += tr.rate;
    if (!(qs > 0.0)) throw Error(ErrorCode::Singular, "source has no exit");
    return srow.reward / qs;
}

double mean_hitting_time(const SparseGenerator& gen, int source, std::span<const char> targets) {
    const std::vector<double> ones(static_cast<std::size_t>(gen.size()), 1.0);
    return expected_reward_until_hit(gen, source, targets, ones);
}

PoissonWeights poisson_weights(double lambda, double tol) {
    PoissonWeights pw;
    if (lambda <= 0.0) {
        pw.weights = {1.0};
        return pw;
    }
    const long mode = static_cast<long>(std::floor(lambda));
    const double log_mode = -lambda + static_cast<double>(mode) * std::log(lambda) - std::lgamma(static_cast<double>(mode) + 1.0);
    // Unnormalised weights relative to the mode, then renormalised.
    std::vector<double> left, right;
    const double cut = tol * 1e-3;
    double w = 1.0;
    for (long k = mode; k > 0;) {
        w *= static_cast<double>(k) / lambda;
        --k;
        if (w < cut) break;
        left.push_back(w);
    }
    w = 1.0;
    right.push_back(1.0);
    for (long k = mode + 1;; ++k) {
        w *= lambda / static_cast<double>(k);
        if (w < cut && static_cast<double>(k) > lambda) break;
        right.push_back(w);
    }
    pw.first = mode - static_cast<long>(left.size());
    pw.weights.assign(left.rbegin(), left.rend());
    pw.weights.insert(pw.weights.end(), right.begin(), right.end());
    const double scale = std::exp(log_mode);
    double total = 0.0;
    for (double& x : pw.weights) total += x;
    // Use the exact mode mass when it is representable, the normalised one otherwise.
    if (scale > 1e-250) {
        for (double& x : pw.weights) x *= scale;
    } else {
        for (double& x : pw.weights) x /= total;
    }
    return pw;
}

std::vector<double> transient_distribution(const SparseGenerator& gen, std::span<const double> p0, double t,
                                           double tol) {
    const int n = gen.size();
    std::vector<double> v(p0.begin(), p0.end());
    if (t <= 0.0) return v;
    const double lambda = gen.max_exit_rate() * 1.02;
    if (lambda <= 0.0) return v;
    const auto pw = poisson_weights(lambda * t, tol);
    std::vector<double> exit(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) exit[static_cast<std::size_t>(i)] = gen.exit_rate(i);
    std::vector<double> result(static_cast<std::size_t>(n), 0.0), next(static_cast<std::size_t>(n));
    const long last = pw.first + static_cast<long>(pw.weights.size());
    for (long k = 0; k < last; ++k) {
        if (k >= pw.first) {
            const double w = pw.weights[static_cast<std::size_t>(k - pw.first)];
            for (int i = 0; i < n; ++i) result[static_cast<std::size_t>(i)] += w * v[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] * (1.0 - exit[static_cast<std::size_t>(i)] / lambda);
        for (int i = 0; i < n; ++i) {
            const double vi = v[static_cast<std::size_t>(i)];
            if (vi == 0.0) continue;
            for (const auto& tr : gen.transitions(i)) next[static_cast<std::size_t>(tr.to)] += vi * tr.rate / lambda;
        }
        v.swap(next);
    }
    return result;
}

std::vector<double> transition_matrix(const SparseGenerator& gen, double t, double tol) {
    const int n = gen.size();
    const auto sz = static_cast<std::size_t>(n);
    std::vector<double> eye(sz * sz, 0.0);
    for (std::size_t i = 0; i < sz; ++i) eye[i * sz + i] = 1.0;
    if (t <= 0.0) return eye;
    const double lambda = gen.max_exit_rate();
    if (lambda <= 0.0) return eye;

    int squarings = 0;
    double h = t;
    while (lambda * h > 1.0) {
        h *= 0.5;
        ++squarings;
    }
    // Uniformized one-step matrix.
    std::vector<double> step(sz * sz, 0.0);
    for (int i = 0; i < n; ++i) {
        step[static_cast<std::size_t>(i) * sz + static_cast<std::size_t>(i)] = 1.0 - gen.exit_rate(i) / lambda;
        for (const auto& tr : gen.transitions(i))
            step[static_cast<std::size_t>(i) * sz + static_cast<std::size_t>(tr.to)] += tr.rate / lambda;
    }
    const auto pw = poisson_weights(lambda * h, tol);
    std::vector<double> power = eye, result(sz * sz, 0.0), tmp(sz * sz);
    auto multiply = [&](const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < sz; ++i)
            for (std::size_t k = 0; k < sz; ++k) {
                const double aik = a[i * sz + k];
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < sz; ++j) out[i * sz + j] += aik * b[k * sz + j];
            }
    };
    const long last = pw.first + static_cast<long>(pw.weights.size());
    for (long k = 0; k < last; ++k) {
        if (k >= pw.first) {
            const double w = pw.weights[static_cast<std::size_t>(k - pw.first)];
            for (std::size_t i = 0; i < sz * sz; ++i) result[i] += w * power[i];
        }
        multiply(power, step, tmp);
        power.swap(tmp);
    }
    for (int s = 0; s < squarings; ++s) {
        multiply(result, result, tmp);
        result.swap(tmp);
    }
    return result;
}

namespace {

// Cyclic Jacobi on a dense symmetric matrix; returns eigenvalues and
// column-major eigenvectors.
void jacobi_eigen(std::vector<double>& a, std::size_t n, std::vector<double>& values, std::vector<double>& vectors) {
    vectors.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) vectors[i * n + i] = 1.0;
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag += at(i, i) * at(i, i);
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        }
        if (off <= 1e-32 * diag) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::hypot(t, 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                at(p, q) = at(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vectors[k * n + p], vkq = vectors[k * n + q];
                    vectors[k * n + p] = c * vkp - s * vkq;
                    vectors[k * n + q] = s * vkp + c * vkq;
                }
            }
    }
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = at(i, i);
}

}  // namespace

ReversiblePhaseType::ReversiblePhaseType(const SparseGenerator& gen, std::span<const double> pi, int source,
                                         std::span<const char> targets) {
    const int n = gen.size();
    if (static_cast<int>(pi.size()) != n || static_cast<int>(targets.size()) != n)
        throw Error(ErrorCode::NumericFailure, "size mismatch in phase-type construction");
    if (targets[static_cast<std::size_t>(source)]) return;
    std::vector<int> local(static_cast<std::size_t>(n), -1);
    std::vector<int> transient;
    for (int x = 0; x < n; ++x)
        if (!targets[static_cast<std::size_t>(x)]) {
            local[static_cast<std::size_t>(x)] = static_cast<int>(transient.size());
            transient.push_back(x);
        }
    const std::size_t m = transient.size();
    if (m > 512) throw Error(ErrorCode::TooLarge, "phase-type representation limited to 512 transient states");
    std::vector<double> a(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const int x = transient[i];
        a[i * m + i] = -gen.exit_rate(x);
        for (const auto& tr : gen.transitions(x)) {
            const int j = local[static_cast<std::size_t>(tr.to)];
            if (j < 0) continue;
            const double px = pi[static_cast<std::size_t>(x)], py = pi[static_cast<std::size_t>(tr.to)];
            double back = 0.0;
            for (const auto& rt : gen.transitions(tr.to))
                if (rt.to == x) back = rt.rate;
            const double flow = px * tr.rate, reverse = py * back;
            if (std::fabs(flow - reverse) > 1e-8 * std::max(flow, reverse))
                throw Error(ErrorCode::NumericFailure, "chain is not reversible with respect to the given law");
            a[i * m + static_cast<std::size_t>(j)] = std::sqrt(px / py) * tr.rate;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) a[i * m + j] = a[j * m + i] = 0.5 * (a[i * m + j] + a[j * m + i]);
    std::vector<double> values, vectors;
    jacobi_eigen(a, m, values, vectors);
    const std::size_t s = static_cast<std::size_t>(local[static_cast<std::size_t>(source)]);
    const double root_src = std::sqrt(pi[static_cast<std::size_t>(source)]);
    for (std::size_t k = 0; k < m; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += vectors[j * m + k] * std::sqrt(pi[static_cast<std::size_t>(transient[j])]);
        const double w = vectors[s * m + k] / root_src * acc;
        if (!(-values[k] > 0.0)) throw Error(ErrorCode::Unreachable, "target set is not reached almost surely");
        rates_.push_back(-values[k]);
        weights_.push_back(w);
    }
}

double ReversiblePhaseType::survival(double t) const {
    if (rates_.empty()) return 0.0;
    if (t <= 0.0) return 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < rates_.size(); ++k) sum += weights_[k] * std::exp(-rates_[k] * t);
    return std::clamp(sum, 0.0, 1.0);
}

double ReversiblePhaseType::mean() const {
    double sum = 0.0;
    for (std::size_t k = 0; k < rates_.size(); ++k) sum += weights_[k] / rates_[k];
    return sum;
}

double ReversiblePhaseType::inverse_survival(double u) const {
    if (rates_.empty() || u >= 1.0) return 0.0;
    const double slowest = *std::min_element(rates_.begin(), rates_.end());
    double lo = 0.0, hi = 1.0 / slowest;
    while (survival(hi) > u) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw Error(ErrorCode::NumericFailure, "phase-type inversion diverged");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (survival(mid) > u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace hcnet
