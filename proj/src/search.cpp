#include "wayfind/search.hpp"

#include <cmath>
#include <vector>

namespace wayfind::search {

SearchResult grid_search(const sim::Position& center, const SearchSpec& spec,
                         const Objective& objective) {
    if (spec.step <= 0.0 || spec.step > spec.radius)
        throw std::invalid_argument("grid_search: need 0 < step <= radius");
    int n = static_cast<int>(std::floor(spec.radius / spec.step + 1e-9));

    SearchResult res;
    bool found = false;
    // ascending (i, j) visits candidates in lexicographic (x, y) order, so
    // keeping the strictly better one realizes the tie-break rule
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            sim::Position cand{center.x + i * spec.step, center.y + j * spec.step};
            std::optional<double> v = objective(cand);
            if (!v) continue;
            ++res.evals;
            if (!found || *v < res.value) {
                res.best = cand;
                res.value = *v;
                found = true;
            }
        }
    }
    if (!found) throw NoFeasibleCandidate("grid_search: no traversable candidate");
    return res;
}

Objective image_objective(sim::World& world, const SearchSpec& spec,
                          const vision::Image& target, const vision::Kernel& kern,
                          bool noise) {
    return [&world, spec, &target, &kern, noise](const sim::Position& p)
               -> std::optional<double> {
        if (!world.map.in_bounds(p) || !world.map.traversable(p)) return std::nullopt;
        world.teleport(p);
        std::vector<vision::Image> frames;
        frames.reserve(spec.n_avg);
        for (int k = 0; k < spec.n_avg; ++k) frames.push_back(world.render(noise));
        return vision::dist(target, vision::average(frames), kern);
    };
}

}  // namespace wayfind::search
