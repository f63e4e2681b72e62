#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nafd/admo.hpp"

namespace nafd {

std::vector<std::size_t> pareto_front(std::span<const Evaluation> table) {
    std::vector<std::size_t> order(table.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = table[a].obj;
        const auto& y = table[b].obj;
        if (x.f1 != y.f1) return x.f1 > y.f1;
        return x.f2 > y.f2;
    });
    // Sweep by decreasing f1. Within a group of equal f1 only the rows with the
    // group's largest f2 can survive, and only if no row with strictly larger
    // f1 reaches that f2.
    std::vector<std::size_t> front;
    double best_f2 = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        const double f1 = table[order[i]].obj.f1;
        while (j < order.size() && table[order[j]].obj.f1 == f1) ++j;
        const double group_f2 = table[order[i]].obj.f2;
        if (group_f2 > best_f2) {
            for (std::size_t k = i; k < j && table[order[k]].obj.f2 == group_f2; ++k) front.push_back(order[k]);
            best_f2 = group_f2;
        }
        i = j;
    }
    std::sort(front.begin(), front.end());
    return front;
}

double front_distance(const Objectives& p, std::span<const Evaluation> table, std::span<const std::size_t> front) {
    if (front.empty()) throw std::invalid_argument("front_distance: empty front");
    double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1, lo2 = lo1, hi2 = -lo1;
    for (const auto& e : table) {
        lo1 = std::min(lo1, e.obj.f1);
        hi1 = std::max(hi1, e.obj.f1);
        lo2 = std::min(lo2, e.obj.f2);
        hi2 = std::max(hi2, e.obj.f2);
    }
    const double r1 = hi1 > lo1 ? hi1 - lo1 : 1.0;
    const double r2 = hi2 > lo2 ? hi2 - lo2 : 1.0;

    std::vector<std::pair<double, double>> pts;
    for (std::size_t i : front) pts.emplace_back(table[i].obj.f1 / r1, table[i].obj.f2 / r2);
    std::sort(pts.begin(), pts.end());
    const double px = p.f1 / r1, py = p.f2 / r2;

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        best = std::min(best, std::hypot(px - pts[i].first, py - pts[i].second));
        if (i + 1 == pts.size()) break;
        const double ax = pts[i].first, ay = pts[i].second;
        const double dx = pts[i + 1].first - ax, dy = pts[i + 1].second - ay;
        const double len2 = dx * dx + dy * dy;
        if (len2 == 0.0) continue;
        const double s = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
        best = std::min(best, std::hypot(px - (ax + s * dx), py - (ay + s * dy)));
    }
    return best;
}

}  // namespace nafd
