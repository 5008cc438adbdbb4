#pragma once

#include <stdexcept>
#include <string>

namespace pmean {

// Error categories, kept in sync with pmean_status in the C header.
enum class Errc {
    invalid_argument = 1,
    parse = 2,
    scaling = 3,
    dimension = 4,
    domain = 5,
    size = 6,
    check_failed = 7,
    io = 8,
    internal = 9,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace pmean
