#include "seqmine/random.hpp"

#include <sstream>

namespace seqmine {

std::string rng_state_to_string(const std::mt19937_64& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

std::mt19937_64 rng_state_from_string(const std::string& text) {
    std::mt19937_64 rng;
    std::istringstream is(text);
    is >> rng;
    if (is.fail()) throw IoError("malformed RNG state string");
    return rng;
}

} // namespace seqmine
