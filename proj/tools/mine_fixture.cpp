// Mines the proof-of-work fixtures used by the tests.
//   mine_fixture pow <out>    prev_hex nonce width threshold of one solved puzzle (p = 2^-12)
//   mine_fixture chain <out>  chain file with interleaved dummy runs and a trailing run
#include "zeroblock/chain.hpp"

#include <fstream>
#include <iostream>
#include <string>

using namespace zeroblock;

namespace {

Chain mine_on(const Chain& chain, MatIndex index, MinerId creator)
{
    const Target target = default_pow_target();
    const BlockId parent = chain.head_id();
    const auto found = find_nonce(parent, target, 0);
    return chain.append(Block::standard(parent, index, found.nonce, creator, index));
}

Chain fixture_chain()
{
    // s = standard, d = dummy, one entry per interval starting at 1.
    const std::string layout = "sddssdsdddsd";
    Chain c;
    MatIndex index = 1;
    for (char k : layout) {
        c = k == 's' ? mine_on(c, index, static_cast<MinerId>(index % 3)) : c.append(make_dummy(c.head(), index));
        ++index;
    }
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    if (argc != 3) {
        std::cerr << "usage: mine_fixture pow|chain <out>\n";
        return 1;
    }
    const std::string mode = argv[1];
    std::ofstream out(argv[2], std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << argv[2] << '\n';
        return 2;
    }
    if (mode == "pow") {
        const Target t = Target::toy(32, std::uint64_t{1} << 20);
        const BlockId prev = make_genesis().id();
        const auto found = find_nonce(prev, t, 0);
        out << prev.hex() << ' ' << found.nonce << ' ' << t.width() << ' ' << t.threshold() << '\n';
    } else if (mode == "chain") {
        out << format_chain(fixture_chain());
    } else {
        std::cerr << "unknown mode " << mode << '\n';
        return 1;
    }
    return 0;
}
