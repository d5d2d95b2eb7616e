#include "civ/graph/graph_text.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace civ::graph {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Builder {
    std::vector<Component> components;
    std::vector<RolledEdge> edges;
    bool has_header = false;

    int declare(const std::string& name, bool observed, int line) {
        for (std::size_t i = 0; i < components.size(); ++i) {
            if (components[i].name == name) {
                if (components[i].observed != observed) {
                    throw std::invalid_argument("line " + std::to_string(line) + ": component '" +
                                                name + "' declared both observed and latent");
                }
                return static_cast<int>(i);
            }
        }
        components.push_back({name, observed});
        return static_cast<int>(components.size() - 1);
    }

    // Without a declaration header every name is an observed component; with
    // one, edges may only mention declared names.
    int use(const std::string& name, int line) {
        for (std::size_t i = 0; i < components.size(); ++i) {
            if (components[i].name == name) return static_cast<int>(i);
        }
        if (has_header) {
            throw std::invalid_argument("line " + std::to_string(line) + ": undeclared component '" + name + "'");
        }
        components.push_back({name, true});
        return static_cast<int>(components.size() - 1);
    }
};

// "W[-2]" -> ("W", 2)
std::pair<std::string, int> parse_endpoint(const std::string& text, int line) {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("line " + std::to_string(line) + ": " + why + " in '" + text +
                                    "'");
    };
    auto t = trim(text);
    if (t.empty()) fail("missing endpoint");
    auto br = t.find('[');
    if (br == std::string::npos) return {t, 0};
    if (t.back() != ']') fail("unterminated lag");
    auto name = trim(t.substr(0, br));
    auto inner = trim(t.substr(br + 1, t.size() - br - 2));
    int value = 0;
    std::size_t used = 0;
    try {
        value = std::stoi(inner, &used);
    } catch (const std::exception&) {
        fail("bad lag");
    }
    if (used != inner.size() || value > 0) fail("lag must be written as [-k] with k >= 0");
    if (name.empty()) fail("missing component name");
    return {name, -value};
}

}  // namespace

RolledTimeGraph parse_rolled_graph(std::istream& in, std::string name) {
    Builder b;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        auto text = trim(raw);
        if (text.empty()) continue;

        if (text.rfind("observed:", 0) == 0 || text.rfind("latent:", 0) == 0) {
            bool observed = text[0] == 'o';
            b.has_header = true;
            std::istringstream names(text.substr(text.find(':') + 1));
            std::string n;
            while (names >> n) b.declare(n, observed, line);
            continue;
        }

        EdgeKind kind = EdgeKind::Directed;
        std::size_t pos = text.find("<->");
        std::size_t width = 3;
        if (pos != std::string::npos) {
            kind = EdgeKind::Bidirected;
        } else {
            pos = text.find("->");
            width = 2;
            if (pos == std::string::npos) {
                throw std::invalid_argument("line " + std::to_string(line) +
                                            ": expected '->' or '<->'");
            }
        }
        auto [src, lag] = parse_endpoint(text.substr(0, pos), line);
        auto [dst, dst_lag] = parse_endpoint(text.substr(pos + width), line);
        if (dst_lag != 0) {
            throw std::invalid_argument("line " + std::to_string(line) +
                                        ": edge target must be at lag 0");
        }
        int s = b.use(src, line);
        int d = b.use(dst, line);
        b.edges.push_back({kind, s, lag, d});
    }
    return RolledTimeGraph(std::move(b.components), std::move(b.edges), std::move(name));
}

RolledTimeGraph parse_rolled_graph(const std::string& text, std::string name) {
    std::istringstream in(text);
    return parse_rolled_graph(in, std::move(name));
}

RolledTimeGraph load_rolled_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
    return parse_rolled_graph(in, path);
}

std::string format_rolled_graph(const RolledTimeGraph& g) {
    std::ostringstream out;
    if (!g.name().empty()) out << "# " << g.name() << "\n";
    std::string observed;
    std::string latent;
    for (const auto& c : g.components()) (c.observed ? observed : latent) += " " + c.name;
    out << "observed:" << observed << "\n";
    if (!latent.empty()) out << "latent:" << latent << "\n";
    for (const auto& e : g.edges()) {
        const auto& src = g.components()[static_cast<std::size_t>(e.source)].name;
        const auto& dst = g.components()[static_cast<std::size_t>(e.target)].name;
        out << src;
        if (e.lag > 0) out << "[-" << e.lag << "]";
        out << (e.kind == EdgeKind::Directed ? " -> " : " <-> ") << dst << "\n";
    }
    return out.str();
}

}  // namespace civ::graph
