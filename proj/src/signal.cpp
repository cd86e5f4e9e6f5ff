#include "tvseg/signal.hpp"

#include "tvseg/error.hpp"
#include "tvseg/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

namespace tvseg {

GridSignal::GridSignal(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() == 0) throw InvalidInput("empty signal");
    if (!values_.allFinite()) throw InvalidInput("non-finite signal value");
}

bool GridSignal::in_unit_range() const {
    return values_.minCoeff() >= 0.0 && values_.maxCoeff() <= 1.0;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

} // namespace

GridSignal from_csv(std::string_view text) {
    std::vector<double> values;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;

        double v = 0.0;
        if (parse_double(line, v)) {
            values.push_back(v);
            continue;
        }
        // a header is only allowed as the first line
        const bool header = line_no == 1 && !(std::isdigit(static_cast<unsigned char>(line.front())) ||
                                              line.front() == '-' || line.front() == '+' ||
                                              line.front() == '.');
        if (!header) throw InvalidInput("parse error at line " + std::to_string(line_no));
    }
    if (values.empty()) throw InvalidInput("empty signal");
    return GridSignal(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size())));
}

std::string to_csv(const GridSignal& f) {
    std::string out;
    char buf[32];
    for (Index i = 0; i < f.size(); ++i) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, f[i]);
        out.append(buf, ptr);
        out.push_back('\n');
    }
    return out;
}

GridSignal from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("json parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("values") || !j["values"].is_array())
        throw InvalidInput("json signal must be an object with a \"values\" array");
    const auto& arr = j["values"];
    Eigen::VectorXd v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw InvalidInput("parse error at value " + std::to_string(i + 1));
        v[static_cast<Index>(i)] = arr[i].get<double>();
    }
    if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<long long>() != v.size()))
        throw InvalidInput("json signal: n does not match the number of values");
    return GridSignal(std::move(v));
}

std::string to_json(const GridSignal& f) {
    nlohmann::json j;
    j["n"] = f.size();
    j["values"] = std::vector<double>(f.values().begin(), f.values().end());
    return j.dump();
}

GridSignal normalize_to_unit(const GridSignal& f) {
    const double lo = f.values().minCoeff();
    const double hi = f.values().maxCoeff();
    if (lo == hi) return GridSignal(Eigen::VectorXd::Constant(f.size(), 0.5));
    if (lo == 0.0 && hi == 1.0) return f;
    Eigen::VectorXd v = (f.values().array() - lo) / (hi - lo);
    return GridSignal(v.cwiseMax(0.0).cwiseMin(1.0));
}

namespace {

GridSignal generate_piecewise_constant(const GeneratorSpec& spec, Index n) {
    if (spec.segments > n) throw InvalidInput("invalid generator spec");
    SplitMix64 rng(spec.seed);

    // choose segments-1 distinct cut boundaries from 1..n-1
    std::vector<Index> pool(static_cast<std::size_t>(n - 1));
    for (Index k = 1; k < n; ++k) pool[static_cast<std::size_t>(k - 1)] = k;
    const auto cuts_needed = static_cast<std::size_t>(spec.segments - 1);
    for (std::size_t i = 0; i < cuts_needed; ++i) {
        const auto j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    std::vector<Index> cuts(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cuts_needed));
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(n);

    Eigen::VectorXd v(n);
    Index start = 0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (const Index end : cuts) {
        double value = rng.uniform(spec.lo, spec.hi);
        while (value == prev) value = rng.uniform(spec.lo, spec.hi);
        v.segment(start, end - start).setConstant(value);
        prev = value;
        start = end;
    }
    return GridSignal(std::move(v));
}

GridSignal generate_weierstrass(const GeneratorSpec& spec, Index n) {
    // seed 0 is the unshifted sum; other seeds shift x by a uniform offset in [0,1)
    const double shift = spec.seed == 0 ? 0.0 : SplitMix64(spec.seed).uniform();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (Index i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n) + shift;
        double amp = 1.0;
        double freq = std::numbers::pi;
        double sum = 0.0;
        for (int k = 0; k < spec.terms; ++k) {
            sum += amp * std::cos(freq * x);
            amp *= spec.a;
            freq *= spec.b;
        }
        v[i] = sum;
    }
    return normalize_to_unit(GridSignal(std::move(v)));
}

} // namespace

GridSignal generate(const GeneratorSpec& spec, Index n) {
    if (n < 1) throw InvalidInput("invalid generator spec");
    switch (spec.kind) {
    case GeneratorSpec::Kind::PiecewiseConstant:
        if (spec.segments < 1 || !(spec.lo >= 0.0 && spec.hi <= 1.0 && spec.lo <= spec.hi) ||
            (spec.segments > 1 && spec.lo == spec.hi))
            throw InvalidInput("invalid generator spec");
        return generate_piecewise_constant(spec, n);
    case GeneratorSpec::Kind::Weierstrass:
        if (!(spec.a > 0.0 && spec.a < 1.0) || spec.b < 1 || spec.terms < 0)
            throw InvalidInput("invalid generator spec");
        return generate_weierstrass(spec, n);
    }
    throw InvalidInput("invalid generator spec");
}

GeneratorSpec parse_generator_spec(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find(':', pos);
        if (next == std::string_view::npos) next = text.size();
        parts.push_back(text.substr(pos, next - pos));
        pos = next + 1;
    }
    if (parts.empty()) throw InvalidInput("invalid generator spec");

    GeneratorSpec spec;
    const auto kind = parts.front();
    if (kind == "pwc" || kind == "piecewise-constant") {
        spec.kind = GeneratorSpec::Kind::PiecewiseConstant;
    } else if (kind == "weierstrass" || kind == "weierstrass-type") {
        spec.kind = GeneratorSpec::Kind::Weierstrass;
    } else {
        throw InvalidInput("invalid generator spec");
    }

    auto number = [](std::string_view s) {
        double v = 0.0;
        if (!parse_double(s, v)) throw InvalidInput("invalid generator spec");
        return v;
    };
    auto integer = [&](std::string_view s) {
        const double v = number(s);
        if (v != std::floor(v) || std::abs(v) > 1e15) throw InvalidInput("invalid generator spec");
        return v;
    };

    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto part = parts[i];
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) {
            // bare number after pwc: segment count
            if (spec.kind != GeneratorSpec::Kind::PiecewiseConstant || i != 1)
                throw InvalidInput("invalid generator spec");
            spec.segments = static_cast<int>(integer(part));
            continue;
        }
        const auto key = part.substr(0, eq);
        const auto value = part.substr(eq + 1);
        if (key == "seed") {
            const double s = integer(value);
            if (s < 0) throw InvalidInput("invalid generator spec");
            spec.seed = static_cast<std::uint64_t>(s);
        } else if (key == "segments") {
            spec.segments = static_cast<int>(integer(value));
        } else if (key == "lo") {
            spec.lo = number(value);
        } else if (key == "hi") {
            spec.hi = number(value);
        } else if (key == "a") {
            spec.a = number(value);
        } else if (key == "b") {
            spec.b = static_cast<int>(integer(value));
        } else if (key == "terms") {
            spec.terms = static_cast<int>(integer(value));
        } else {
            throw InvalidInput("invalid generator spec");
        }
    }
    return spec;
}

std::string signal_digest(const GridSignal& f) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Index i = 0; i < f.size(); ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(f[i]);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xFFU;
            h *= 0x100000001b3ULL;
        }
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xFU];
    return out;
}

} // namespace tvseg
