#include "fracstep/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace fracstep {

std::string_view to_string(Scheme scheme) noexcept {
    switch (scheme) {
    case Scheme::L1: return "l1";
    case Scheme::FastL1: return "fast-l1";
    case Scheme::Alikhanov: return "alikhanov";
    case Scheme::BDF2: return "bdf2";
    case Scheme::BDF2Recombined: return "bdf2-recombined";
    }
    return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
    std::string key(name);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
        return c == '_' ? '-' : static_cast<char>(std::tolower(c));
    });
    for (Scheme s : {Scheme::L1, Scheme::FastL1, Scheme::Alikhanov, Scheme::BDF2, Scheme::BDF2Recombined})
        if (key == to_string(s)) return s;
    if (key == "fastl1") return Scheme::FastL1;
    if (key == "l2-1sigma" || key == "l2-1-sigma") return Scheme::Alikhanov;
    throw Error(ErrorKind::Domain, "unknown scheme '" + std::string(name) + "'");
}

} // namespace fracstep
