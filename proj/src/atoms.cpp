#include "mvw/atoms.hpp"

#include <algorithm>

namespace mvw {

std::vector<std::size_t> sortedUnique(std::vector<std::size_t> sites) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    return sites;
}

bool sitesIntersect(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j)
            ++i;
        else
            ++j;
    }
    return false;
}

}  // namespace mvw
