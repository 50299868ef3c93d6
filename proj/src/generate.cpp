#include "sogppa/generate.hpp"

#include <algorithm>
#include <string>

#include "sogppa/rng.hpp"

namespace sogppa {

namespace {

struct LiveNet {
    std::string name;
    int width;
};

uint64_t mask_bits(int width) {
    return width >= 64 ? ~0ULL : ((1ULL << width) - 1);
}

} // namespace

void GenParams::check() const {
    if (n_stages < 1 || ops_per_stage < 1) throw NetlistError("counts must be positive");
    if (width_min < 1 || width_min > width_max || width_max > 16)
        throw NetlistError("width bounds out of range (1..16, min <= max)");
    if (clock_set.empty()) throw NetlistError("clock_set must be non-empty");
}

WordDesign generate_design(const GenParams& params) {
    params.check();
    Rng rng(derive_seed(params.seed, 0xD5160));

    WordDesign d;
    d.name = "gen_" + std::to_string(params.seed);
    d.clock_period_ns = params.clock_set[rng.below(params.clock_set.size())];

    auto rand_width = [&] {
        return static_cast<int>(rng.range(params.width_min, params.width_max));
    };

    std::vector<LiveNet> pool;
    const int n_inputs = static_cast<int>(rng.range(2, 4));
    for (int i = 0; i < n_inputs; ++i) {
        Port p{"in" + std::to_string(i), true, rand_width()};
        pool.push_back({p.name, p.width});
        d.ports.push_back(std::move(p));
    }

    auto add_net = [&](const std::string& name, int width) {
        d.nets.emplace_back(name, width);
        pool.push_back({name, width});
    };
    auto pick = [&]() -> const LiveNet& { return pool[rng.below(pool.size())]; };
    auto pick_width = [&](int w) -> const LiveNet* {
        std::vector<const LiveNet*> c;
        for (const auto& n : pool)
            if (n.width == w) c.push_back(&n);
        return c.empty() ? nullptr : c[rng.below(c.size())];
    };

    int uid = 0;
    for (int stage = 0; stage < params.n_stages; ++stage) {
        for (int op = 0; op < params.ops_per_stage; ++op) {
            const std::string out = "s" + std::to_string(stage) + "_n" + std::to_string(uid++);
            WordNode nd;
            nd.output = out;
            // all supported combinational kinds, uniformly weighted; kinds
            // whose operand constraints cannot be met fall back to NOT
            static const WordKind kinds[] = {
                WordKind::Const, WordKind::Not, WordKind::And, WordKind::Or,
                WordKind::Xor, WordKind::Add, WordKind::Sub, WordKind::Mux,
                WordKind::Eq, WordKind::Lt, WordKind::Shl, WordKind::Shr,
                WordKind::Concat, WordKind::Slice, WordKind::RedOr,
                WordKind::RedAnd, WordKind::RedXor};
            nd.kind = kinds[rng.below(std::size(kinds))];
            int ow = 1;
            switch (nd.kind) {
            case WordKind::Const: {
                ow = rand_width();
                nd.const_value = rng.next() & mask_bits(ow);
                break;
            }
            case WordKind::Not: {
                const auto& a = pick();
                nd.inputs = {a.name};
                ow = a.width;
                break;
            }
            case WordKind::And:
            case WordKind::Or:
            case WordKind::Xor: {
                const auto& a = pick();
                const auto* b = pick_width(a.width);
                nd.inputs = {a.name, b->name};
                ow = a.width;
                break;
            }
            case WordKind::Add:
            case WordKind::Sub: {
                const auto& a = pick();
                const auto& b = pick();
                ow = std::min<int>(std::max(a.width, b.width) + static_cast<int>(rng.below(2)),
                                   params.width_max);
                ow = std::max({ow, a.width, b.width});
                nd.inputs = {a.name, b.name};
                break;
            }
            case WordKind::Mux: {
                const auto* sel = pick_width(1);
                if (!sel) {
                    const auto& a = pick();
                    nd.kind = WordKind::Not;
                    nd.inputs = {a.name};
                    ow = a.width;
                    break;
                }
                const auto& a = pick();
                const auto* b = pick_width(a.width);
                nd.inputs = {sel->name, a.name, b->name};
                ow = a.width;
                break;
            }
            case WordKind::Eq:
            case WordKind::Lt: {
                const auto& a = pick();
                const auto* b = pick_width(a.width);
                nd.inputs = {a.name, b->name};
                ow = 1;
                break;
            }
            case WordKind::Shl:
            case WordKind::Shr: {
                const auto& a = pick();
                nd.inputs = {a.name};
                nd.shift_amount = static_cast<int>(rng.below(static_cast<uint64_t>(a.width)));
                ow = a.width;
                break;
            }
            case WordKind::Concat: {
                const auto& a = pick();
                const auto& b = pick();
                if (a.width + b.width > 16) {
                    nd.kind = WordKind::Not;
                    nd.inputs = {a.name};
                    ow = a.width;
                    break;
                }
                nd.inputs = {a.name, b.name};
                ow = a.width + b.width;
                break;
            }
            case WordKind::Slice: {
                const auto& a = pick();
                nd.slice_lo = static_cast<int>(rng.below(static_cast<uint64_t>(a.width)));
                nd.slice_hi =
                    nd.slice_lo + static_cast<int>(rng.below(static_cast<uint64_t>(a.width - nd.slice_lo)));
                nd.inputs = {a.name};
                ow = nd.slice_hi - nd.slice_lo + 1;
                break;
            }
            case WordKind::RedOr:
            case WordKind::RedAnd:
            case WordKind::RedXor: {
                const auto& a = pick();
                nd.inputs = {a.name};
                ow = 1;
                break;
            }
            case WordKind::Reg:
                break; // not drawn
            }
            d.nodes.push_back(nd);
            add_net(out, ow);
        }

        // stage boundary: a REG bank over a random subset of the live pool
        const bool last = stage == params.n_stages - 1;
        const int n_regs = static_cast<int>(rng.range(2, std::min<int64_t>(5, pool.size() + 1)));
        std::vector<LiveNet> next_pool;
        for (int r = 0; r < n_regs; ++r) {
            const auto& src = pool[rng.below(pool.size())];
            std::string qname = last ? "out" + std::to_string(r)
                                     : "r" + std::to_string(stage) + "_" + std::to_string(r);
            WordNode reg;
            reg.kind = WordKind::Reg;
            reg.inputs = {src.name};
            reg.output = qname;
            d.nodes.push_back(std::move(reg));
            if (last) {
                d.ports.push_back({qname, false, src.width});
            } else {
                d.nets.emplace_back(qname, src.width);
            }
            next_pool.push_back({qname, src.width});
        }
        if (last) {
            // one combinational output so PO endpoints exist too
            const auto& src = pool[rng.below(pool.size())];
            WordNode po;
            po.kind = WordKind::Not;
            po.inputs = {src.name};
            po.output = "out_comb";
            d.nodes.push_back(std::move(po));
            d.ports.push_back({"out_comb", false, src.width});
        }
        if (!last) {
            // a couple of unregistered nets flow onward, so some paths cross
            // stage boundaries combinationally and arrival times spread out
            const int carry = static_cast<int>(rng.below(3));
            for (int c = 0; c < carry; ++c) next_pool.push_back(pool[rng.below(pool.size())]);
        }
        pool = std::move(next_pool);
    }

    d.validate();
    return d;
}

} // namespace sogppa
