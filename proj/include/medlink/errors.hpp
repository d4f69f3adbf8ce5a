#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace medlink {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// malformed scenario text; line is 1-based, 0 when unknown
struct ParseError : Error {
    ParseError(int line_, const std::string& what_)
        : Error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what_ : what_),
          line(line_) {}
    int line = 0;
};

// one invariant violation; code is machine-readable ("traffic.inter_arrival.min")
struct Violation {
    std::string code;
    std::string message;
    bool operator==(const Violation&) const = default;
};

struct ValidationError : Error {
    explicit ValidationError(std::vector<Violation> v)
        : Error(join(v)), violations(std::move(v)) {}
    std::vector<Violation> violations;

  private:
    static std::string join(const std::vector<Violation>& v) {
        std::string s;
        for (const auto& x : v) {
            if (!s.empty()) s += "; ";
            s += x.code + ": " + x.message;
        }
        return s;
    }
};

struct UnknownProfile : Error {
    explicit UnknownProfile(const std::string& id)
        : Error("unknown profile \"" + id + "\""), profile_id(id) {}
    std::string profile_id;
};

// operation applied to the wrong mac_kind
struct WrongKind : Error {
    using Error::Error;
};

// literal-mode expectation is only defined for the printed exponent
struct UnsupportedBE : Error {
    using Error::Error;
};

struct EmptySamples : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct UnknownParameter : Error {
    using Error::Error;
};

struct TypeMismatch : Error {
    using Error::Error;
};

struct IntractableEnumeration : Error {
    using Error::Error;
};

}  // namespace medlink
