#include "su3lgt/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "su3lgt/cg.hpp"

namespace su3lgt {

RunConfig RunConfig::parse_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open config file " + file.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_text(os.str());
}

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig c;
    c.raw = text;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char ch : line)
                if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
            if (blank) continue;
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        c.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    c.validate();
    return c;
}

void RunConfig::apply(const std::string& key, const std::string& value) {
    std::istringstream vs(value);
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("config key '" + key + "': " + why);
    };
    if (key == "dimension") vs >> dimension;
    else if (key == "extents") {
        extents.clear();
        int x;
        while (vs >> x) extents.push_back(x);
        if (extents.empty()) fail("expected one or two integers");
    } else if (key == "boundary") {
        std::string b;
        vs >> b;
        if (b == "open") boundary = Boundary::open;
        else if (b == "periodic") boundary = Boundary::periodic;
        else fail("expected open or periodic");
    } else if (key == "lambda") vs >> lambda;
    else if (key == "g") vs >> g;
    else if (key == "a") vs >> a;
    else if (key == "t") vs >> t;
    else if (key == "steps") vs >> steps;
    else if (key == "order") vs >> order;
    else if (key == "error_p") vs >> error_p;
    else if (key == "p_scan") {
        p_scan.clear();
        double x;
        while (vs >> x) p_scan.push_back(x);
    } else if (key == "shots") vs >> shots;
    else if (key == "seed") vs >> seed;
    else if (key == "output") {
        std::string s;
        std::getline(vs, s);
        const auto b = s.find_first_not_of(" \t");
        output = b == std::string::npos ? "out" : s.substr(b);
    } else fail("unknown key");
    if (vs.fail() && key != "extents" && key != "p_scan" && key != "output")
        fail("could not parse value '" + value + "'");
}

void RunConfig::validate() const {
    auto fail = [](const std::string& why) { throw std::invalid_argument("config: " + why); };
    if (dimension != 1 && dimension != 2) fail("dimension must be 1 or 2");
    if (dimension == 1 && extents.size() != 1) fail("dimension 1 takes a single extent");
    if (dimension == 2 && extents.size() != 2) fail("dimension 2 takes two extents");
    for (int e : extents)
        if (e < 1) fail("extents must be positive");
    if (lambda < 0 || lambda > 8) fail("lambda must be in 0..8");
    if (g <= 0 || a <= 0) fail("g and a must be positive");
    if (steps < 0) fail("steps must be non-negative");
    if (order != 1 && order != 2) fail("order must be 1 or 2");
    if (error_p < 0 || error_p > 1) fail("error_p must lie in [0,1]");
    for (double p : p_scan)
        if (p <= 0 || p > 1) fail("p_scan entries must lie in (0,1]");
    if (shots < 1) fail("shots must be positive");
}

std::string RunConfig::normalized() const {
    std::ostringstream os;
    os.precision(17);
    os << "dimension = " << dimension << "\n";
    os << "extents =";
    for (int e : extents) os << " " << e;
    os << "\n";
    os << "boundary = " << (boundary == Boundary::open ? "open" : "periodic") << "\n";
    os << "lambda = " << lambda << "\n";
    os << "g = " << g << "\n";
    os << "a = " << a << "\n";
    os << "t = " << t << "\n";
    os << "steps = " << steps << "\n";
    os << "order = " << order << "\n";
    os << "error_p = " << error_p << "\n";
    if (!p_scan.empty()) {
        os << "p_scan =";
        for (double p : p_scan) os << " " << p;
        os << "\n";
    }
    os << "shots = " << shots << "\n";
    os << "seed = " << seed << "\n";
    os << "output = " << output.string() << "\n";
    return os.str();
}

std::string RunConfig::hash_hex() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(normalized()));
    return buf;
}

LatticeGeometry RunConfig::geometry() const {
    if (dimension == 1) return LatticeGeometry::string_chain(extents[0], boundary);
    return LatticeGeometry::grid(extents[0], extents[1], boundary);
}

}  // namespace su3lgt
