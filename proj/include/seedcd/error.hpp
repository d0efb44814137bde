#ifndef SEEDCD_ERROR_HPP
#define SEEDCD_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seedcd {

/// Malformed input text (edge lists, seed files, ground-truth files).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Some non-seed nodes have no path to any seed, so absorption is not guaranteed.
class ReachabilityError : public std::runtime_error {
public:
    explicit ReachabilityError(std::vector<std::size_t> nodes)
        : std::runtime_error(std::to_string(nodes.size()) + " node(s) cannot reach any seed"),
          nodes_(std::move(nodes)) {}

    const std::vector<std::size_t>& nodes() const { return nodes_; }

private:
    std::vector<std::size_t> nodes_;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Benchmark parameters that could not be realized after the bounded retries.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}

#endif
