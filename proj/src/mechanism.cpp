#include "col/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

namespace col::privacy {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(MechanismKind kind) {
    return kind == MechanismKind::Suppression ? "sup" : "bdp";
}

MechanismKind mechanism_from_string(const std::string& s) {
    if (s == "sup" || s == "suppression") return MechanismKind::Suppression;
    if (s == "bdp") return MechanismKind::BoundedDP;
    throw Error("unknown mechanism '" + s + "' (expected sup or bdp)");
}

void MechanismSpec::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("MechanismSpec: p must be in [0,1]");
}

double MechanismSpec::epsilon() const { return p_to_epsilon(p); }

std::string MechanismSpec::to_json() const {
    nlohmann::json j{{"kind", to_string(kind)}, {"p", p}, {"seed", rng_seed}};
    return j.dump();
}

MechanismSpec MechanismSpec::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    MechanismSpec spec;
    spec.kind = mechanism_from_string(j.at("kind").get<std::string>());
    spec.p = j.at("p").get<double>();
    spec.rng_seed = j.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
}

double epsilon_to_p(double epsilon) {
    if (std::isinf(epsilon)) return 0.0;
    if (!(epsilon >= 0.0)) throw Error("epsilon_to_p: epsilon must be >= 0");
    return 1.0 / (epsilon + 1.0);
}

double p_to_epsilon(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("p_to_epsilon: p must be in [0,1]");
    if (p == 0.0) return kInf;
    return 1.0 / p - 1.0;
}

double sensitivity(const SensitivityParams& params) {
    const double sign = params.variant == SensitivityVariant::PaperEq6 ? -1.0 : 1.0;
    const double term = params.rating_span * params.p_max + sign * params.regularization * params.q_max;
    const double s = static_cast<double>(params.feature_count) * static_cast<double>(params.iteration_count) *
                     params.learning_rate * term;
    if (s < 0.0) throw Error("sensitivity: negative value; regularization term dominates");
    return s;
}

double laplace_sample(col::Rng& rng, double scale) {
    // inverse CDF on u in (-1/2, 1/2)
    const double u = uniform_real(rng, 0.0, 1.0) - 0.5;
    const double s = u < 0 ? -1.0 : 1.0;
    return -scale * s * std::log(1.0 - 2.0 * std::abs(u));
}

recsys::RatingDataset apply_suppression(const recsys::RatingDataset& ds, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("apply_suppression: p must be in [0,1]");
    const auto keep = static_cast<std::size_t>(std::llround((1.0 - p) * static_cast<double>(ds.size())));
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto rng = make_rng(seed, /*stream=*/41);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());  // preserve input order in output
    std::vector<recsys::Rating> kept;
    kept.reserve(keep);
    for (auto k : idx) kept.push_back(ds.ratings()[k]);
    return recsys::RatingDataset(std::move(kept), ds.r_min(), ds.r_max());
}

recsys::RatingDataset apply_bdp(const recsys::RatingDataset& ds, double epsilon, double sensitivity,
                                std::uint64_t seed) {
    if (std::isinf(epsilon)) return ds;  // zero noise, exact no-op
    if (!(epsilon > 0.0)) throw Error("apply_bdp: finite epsilon must be positive");
    const double scale = sensitivity / epsilon;
    auto rng = make_rng(seed, /*stream=*/43);
    std::vector<recsys::Rating> out;
    out.reserve(ds.size());
    for (const auto& r : ds.ratings()) {
        double v = r.value + laplace_sample(rng, scale);
        v = std::min(ds.r_max(), std::max(ds.r_min(), v));
        out.push_back({r.user, r.item, v});
    }
    return recsys::RatingDataset(std::move(out), ds.r_min(), ds.r_max());
}

}  // namespace col::privacy
