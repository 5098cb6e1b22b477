#include "socperc/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace socperc {

Configuration all_open(const BoxGeometry& box) {
    Configuration c;
    c.bits.assign(static_cast<std::size_t>(box.edge_count()), 1);
    c.open_count = box.edge_count();
    return c;
}

Configuration all_closed(const BoxGeometry& box) {
    Configuration c;
    c.bits.assign(static_cast<std::size_t>(box.edge_count()), 0);
    c.open_count = 0;
    return c;
}

Configuration sample_bernoulli(const BoxGeometry& box, double p, RandomStream& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("edge probability must lie in [0, 1]");
    Configuration c = all_closed(box);
    for (EdgeId e = 0; e < box.edge_count(); ++e)
        if (rng.next_bernoulli(p)) c.set(e, true);
    return c;
}

namespace {

struct UnionFind {
    std::vector<std::int32_t> parent;
    std::vector<std::int64_t> size;

    explicit UnionFind(std::int64_t n)
        : parent(static_cast<std::size_t>(n)), size(static_cast<std::size_t>(n), 1) {
        for (std::int64_t i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    }

    std::int32_t find(std::int32_t v) {
        std::int32_t root = v;
        while (parent[static_cast<std::size_t>(root)] != root) root = parent[static_cast<std::size_t>(root)];
        while (parent[static_cast<std::size_t>(v)] != root) {
            std::int32_t next = parent[static_cast<std::size_t>(v)];
            parent[static_cast<std::size_t>(v)] = root;
            v = next;
        }
        return root;
    }

    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    }
};

}  // namespace

ClusterAnalysis analyze(const BoxGeometry& box, const Configuration& config) {
    if (config.edge_count() != box.edge_count())
        throw std::invalid_argument("configuration does not belong to this box");

    const std::int64_t nv = box.vertex_count();
    UnionFind uf(nv);
    for (EdgeId e = 0; e < box.edge_count(); ++e)
        if (config.open(e)) uf.unite(box.edge(e).u, box.edge(e).v);

    ClusterAnalysis out;
    out.label.resize(static_cast<std::size_t>(nv));
    out.open_bits = config.bits;

    std::vector<std::uint8_t> touches_boundary(static_cast<std::size_t>(nv), 0);
    for (VertexId v : box.boundary()) touches_boundary[static_cast<std::size_t>(uf.find(v))] = 1;

    for (VertexId v = 0; v < nv; ++v) {
        const std::int32_t root = uf.find(v);
        out.label[static_cast<std::size_t>(v)] = root;
        if (root == v) {
            const std::int64_t sz = uf.size[static_cast<std::size_t>(root)];
            out.sizes.push_back(sz);
            out.cmax_size = std::max(out.cmax_size, sz);
            if (touches_boundary[static_cast<std::size_t>(root)])
                out.cn_size = std::max(out.cn_size, sz);
        }
        if (touches_boundary[static_cast<std::size_t>(root)]) out.boundary_connected.push_back(v);
    }
    return out;
}

FunctionalKind FunctionalKind::big_clusters(double b) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("cluster-size exponent must lie in (0, 1)");
    return {Functional::kBigClusters, b};
}

FunctionalKind FunctionalKind::big_diameters(double b) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("cluster-size exponent must lie in (0, 1)");
    return {Functional::kBigDiameters, b};
}

std::string FunctionalKind::name() const {
    switch (which) {
        case Functional::kCmax: return "cmax";
        case Functional::kBoundary: return "boundary";
        case Functional::kBigClusters: return "bnb";
        case Functional::kBigDiameters: return "bnb-diam";
    }
    return "?";
}

FunctionalKind parse_functional(const std::string& token, double b) {
    if (token == "cmax") return FunctionalKind::cmax();
    if (token == "boundary") return FunctionalKind::boundary();
    if (token == "bnb") return FunctionalKind::big_clusters(b);
    if (token == "bnb-diam") return FunctionalKind::big_diameters(b);
    throw std::invalid_argument("unknown functional '" + token +
                                "' (expected cmax, boundary, bnb or bnb-diam)");
}

std::int64_t size_threshold(int side, double exponent) {
    const double t = std::pow(static_cast<double>(side), exponent);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t - 1e-9)));
}

namespace {

void require_compatible(const FunctionalKind& kind, const BoxGeometry& box) {
    if (kind.needs_free_boundary() && box.torus())
        throw std::invalid_argument("functional '" + kind.name() + "' requires a free-boundary box");
}

}  // namespace

bool shell_reach_probe(const BoxGeometry& box, const std::vector<std::uint8_t>& open_bits,
                       std::int64_t m, VertexId x, EdgeId override_edge, bool override_open,
                       ReachScratch& scratch) {
    const int d = box.dim();
    const int lo_off = -static_cast<int>(m / 2);
    const int hi_off = static_cast<int>((m - 1) / 2);

    if (scratch.seen.size() != static_cast<std::size_t>(box.vertex_count())) {
        scratch.seen.assign(static_cast<std::size_t>(box.vertex_count()), 0);
        scratch.stamp = 0;
    }
    scratch.base.resize(static_cast<std::size_t>(d));
    scratch.probe.resize(static_cast<std::size_t>(d));
    const std::int32_t stamp = ++scratch.stamp;

    auto on_shell = [&](const int* y) {
        for (int i = 0; i < d; ++i) {
            const int off = y[i] - scratch.base[i];
            if (off == lo_off || off == hi_off) return true;
        }
        return false;
    };

    box.coords(x, scratch.base.data());
    if (on_shell(scratch.base.data())) return true;  // m <= 2 puts x on its own shell

    scratch.queue.clear();
    scratch.queue.push_back(x);
    scratch.seen[static_cast<std::size_t>(x)] = stamp;
    for (std::size_t head = 0; head < scratch.queue.size(); ++head) {
        const VertexId v = scratch.queue[head];
        for (EdgeId e : box.incident(v)) {
            const bool open = e == override_edge ? override_open
                                                 : open_bits[static_cast<std::size_t>(e)] != 0;
            if (!open) continue;
            const VertexId w = box.other_end(e, v);
            if (scratch.seen[static_cast<std::size_t>(w)] == stamp) continue;
            box.coords(w, scratch.probe.data());
            bool inside = true;
            for (int i = 0; i < d && inside; ++i) {
                const int off = scratch.probe[i] - scratch.base[i];
                inside = off >= lo_off && off <= hi_off;
            }
            if (!inside) continue;
            scratch.seen[static_cast<std::size_t>(w)] = stamp;
            if (on_shell(scratch.probe.data())) return true;
            scratch.queue.push_back(w);
        }
    }
    return false;
}

std::vector<std::uint8_t> shell_reach_flags(const BoxGeometry& box,
                                            const std::vector<std::uint8_t>& open_bits,
                                            std::int64_t m) {
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(box.vertex_count()), 0);
    ReachScratch scratch;
    for (VertexId x = 0; x < box.vertex_count(); ++x)
        flags[static_cast<std::size_t>(x)] =
            shell_reach_probe(box, open_bits, m, x, -1, false, scratch) ? 1 : 0;
    return flags;
}

std::int64_t evaluate_functional(const FunctionalKind& kind, const BoxGeometry& box,
                                 const ClusterAnalysis& analysis) {
    require_compatible(kind, box);
    switch (kind.which) {
        case Functional::kCmax:
            return analysis.cmax_size;
        case Functional::kBoundary:
            return static_cast<std::int64_t>(analysis.boundary_connected.size());
        case Functional::kBigClusters: {
            const std::int64_t thr = size_threshold(box.side(), kind.exponent);
            std::int64_t total = 0;
            for (std::int64_t s : analysis.sizes)
                if (s >= thr) total += s;
            return total;
        }
        case Functional::kBigDiameters: {
            const std::vector<std::uint8_t> flags = shell_reach_flags(
                box, analysis.open_bits, size_threshold(box.side(), kind.exponent));
            std::int64_t count = 0;
            for (std::uint8_t f : flags) count += f;
            return count;
        }
    }
    throw std::logic_error("unreachable");
}

double phi_n(double x, int side, double a) {
    if (x < 0.0) throw std::invalid_argument("functional value must be nonnegative");
    if (side < 2) throw std::invalid_argument("box side must be >= 2");
    if (!(a > 0.0)) throw std::invalid_argument("feedback exponent must be positive");
    return std::exp(-x / std::pow(static_cast<double>(side), a));
}

double feedback_p(const FunctionalKind& kind, const BoxGeometry& box,
                  const Configuration& config, double a) {
    const std::int64_t f = evaluate_functional(kind, box, analyze(box, config));
    return phi_n(static_cast<double>(f), box.side(), a);
}

double log_weight_terms(std::int64_t open_count, std::int64_t edge_count, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability must lie in [0, 1]");
    const std::int64_t closed = edge_count - open_count;
    double lw = 0.0;
    if (open_count > 0) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        lw += static_cast<double>(open_count) * std::log(p);
    }
    if (closed > 0) {
        if (p == 1.0) return -std::numeric_limits<double>::infinity();
        lw += static_cast<double>(closed) * std::log1p(-p);
    }
    return lw;
}

double log_weight(const BoxGeometry& box, const Configuration& config, double p) {
    return log_weight_terms(config.open_count, box.edge_count(), p);
}

std::string dump_config(const BoxGeometry& box, const Configuration& config) {
    if (config.edge_count() != box.edge_count())
        throw std::invalid_argument("configuration does not belong to this box");
    static const char* digits = "0123456789abcdef";
    std::ostringstream out;
    out << box.dim() << ' ' << box.side() << ' ' << (box.torus() ? 1 : 0) << ' '
        << box.edge_count() << '\n';
    const EdgeId r = box.edge_count();
    for (EdgeId i = 0; i < r; i += 4) {
        int nibble = 0;
        for (int j = 0; j < 4; ++j)
            if (i + j < r && config.open(i + j)) nibble |= 8 >> j;
        out << digits[nibble];
    }
    out << '\n';
    return out.str();
}

std::pair<BoxGeometry, Configuration> parse_config_dump(std::istream& in) {
    int d = 0, n = 0, torus = 0;
    std::int64_t r = 0;
    if (!(in >> d >> n >> torus >> r)) throw std::invalid_argument("bad dump header");
    BoxGeometry box = build_box(d, n, torus != 0);
    if (r != box.edge_count()) throw std::invalid_argument("dump edge count does not match the box");
    std::string hex;
    if (!(in >> hex)) throw std::invalid_argument("missing dump payload");
    if (static_cast<std::int64_t>(hex.size()) != (r + 3) / 4)
        throw std::invalid_argument("dump payload has the wrong length");
    Configuration config = all_closed(box);
    for (EdgeId i = 0; i < r; ++i) {
        const char c = hex[static_cast<std::size_t>(i / 4)];
        int nibble = 0;
        if (c >= '0' && c <= '9') nibble = c - '0';
        else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
        else throw std::invalid_argument("dump payload is not hex");
        if (nibble & (8 >> (i % 4))) config.set(i, true);
    }
    return {std::move(box), std::move(config)};
}

}  // namespace socperc
