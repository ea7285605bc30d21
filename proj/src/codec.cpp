#include "bna/codec.hpp"

#include <algorithm>
#include <cstddef>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

namespace bna::codec {

// ---------------------------------------------------------------------------
// Alphabet

namespace {
constexpr char kBaseChar[4] = {'A', 'C', 'G', 'T'};
}

char to_char(Nucleotide n) { return kBaseChar[static_cast<std::uint8_t>(n)]; }

Nucleotide nucleotide_from_char(char c) {
    switch (c) {
        case 'A': return Nucleotide::A;
        case 'C': return Nucleotide::C;
        case 'G': return Nucleotide::G;
        case 'T': return Nucleotide::T;
        default: throw std::invalid_argument(std::string("invalid nucleotide character: ") + c);
    }
}

std::string to_string(const NucleotideSequence& seq) {
    std::string out;
    out.reserve(seq.size());
    for (Nucleotide n : seq) out.push_back(to_char(n));
    return out;
}

NucleotideSequence sequence_from_string(std::string_view text) {
    NucleotideSequence out;
    out.reserve(text.size());
    for (char c : text) out.push_back(nucleotide_from_char(c));
    return out;
}

Trit::Trit(int v) {
    if (v < 0 || v > 2) throw std::invalid_argument("trit value out of range");
    v_ = static_cast<std::uint8_t>(v);
}

MissingPlasmid::MissingPlasmid(std::vector<std::uint32_t> indices)
    : CodecError("missing plasmid indices: " + [&] {
          std::string s;
          for (std::size_t i = 0; i < indices.size() && i < 16; ++i) {
              if (i) s += ',';
              s += std::to_string(indices[i]);
          }
          if (indices.size() > 16) s += ",...";
          return s;
      }()),
      missing(std::move(indices)) {}

// ---------------------------------------------------------------------------
// Basic encoding

NucleotideSequence encode_basic(std::span<const std::uint8_t> data) {
    NucleotideSequence out;
    out.reserve(data.size() * 4);
    for (std::uint8_t b : data) {
        out.push_back(static_cast<Nucleotide>((b >> 6) & 3));
        out.push_back(static_cast<Nucleotide>((b >> 4) & 3));
        out.push_back(static_cast<Nucleotide>((b >> 2) & 3));
        out.push_back(static_cast<Nucleotide>(b & 3));
    }
    return out;
}

std::vector<std::uint8_t> decode_basic(const NucleotideSequence& seq) {
    if (seq.size() % 4 != 0) {
        throw LengthNotMultipleOfFour("basic decode requires a multiple of four bases, got " +
                                      std::to_string(seq.size()));
    }
    std::vector<std::uint8_t> out;
    out.reserve(seq.size() / 4);
    for (std::size_t i = 0; i < seq.size(); i += 4) {
        std::uint8_t b = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            b = static_cast<std::uint8_t>((b << 2) | static_cast<std::uint8_t>(seq[i + k]));
        }
        out.push_back(b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ternary Huffman

ByteHistogram histogram_of(std::span<const std::uint8_t> data) {
    ByteHistogram hist{};
    for (std::uint8_t b : data) ++hist[b];
    return hist;
}

void HuffmanTable::Packed::push_back(std::uint8_t trit) {
    words[len / 32] |= static_cast<std::uint64_t>(trit) << (2 * (len % 32));
    ++len;
}

std::uint8_t HuffmanTable::Packed::digit(std::size_t i) const {
    return static_cast<std::uint8_t>((words[i / 32] >> (2 * (i % 32))) & 3);
}

namespace {

constexpr std::int32_t kPaddingSymbol = 256;

struct BuildNode {
    std::uint64_t freq = 0;
    // Tie class: real leaves sort before the padding leaf, which sorts before
    // internal nodes; within a class the key (byte value / creation order)
    // decides. This makes the tree a pure function of the histogram.
    std::uint8_t kind = 0;
    std::uint32_t key = 0;
    std::array<std::int32_t, 3> child{-1, -1, -1};
    std::int32_t symbol = -1;
};

}  // namespace

HuffmanTable HuffmanTable::from_histogram(const ByteHistogram& hist) {
    std::vector<BuildNode> nodes;
    nodes.reserve(2 * 257);
    for (int b = 0; b < 256; ++b) {
        nodes.push_back({hist[b], 0, static_cast<std::uint32_t>(b), {-1, -1, -1}, b});
    }
    // One zero-frequency padding leaf brings the count to 257, which satisfies
    // the (count - 1) % 2 == 0 arity requirement for ternary merges.
    nodes.push_back({0, 1, 0, {-1, -1, -1}, kPaddingSymbol});

    using Entry = std::tuple<std::uint64_t, std::uint8_t, std::uint32_t, std::int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(nodes.size()); ++i) {
        queue.emplace(nodes[i].freq, nodes[i].kind, nodes[i].key, i);
    }

    std::uint32_t creation = 0;
    while (queue.size() > 1) {
        BuildNode merged;
        merged.kind = 2;
        merged.key = creation++;
        for (int k = 0; k < 3; ++k) {
            auto [freq, kind, key, idx] = queue.top();
            queue.pop();
            merged.freq += freq;
            merged.child[k] = idx;
        }
        nodes.push_back(merged);
        const std::int32_t idx = static_cast<std::int32_t>(nodes.size()) - 1;
        queue.emplace(merged.freq, merged.kind, merged.key, idx);
    }

    HuffmanTable table;
    table.has_padding_code_ = true;
    table.trie_.reserve(nodes.size());
    table.trie_.emplace_back();

    // Iterative DFS assigning digits in child order (lowest pop first).
    const auto [root_freq, root_kind, root_key, root_idx] = queue.top();
    (void)root_freq;
    (void)root_kind;
    (void)root_key;
    std::vector<std::pair<std::int32_t, Packed>> stack;
    stack.emplace_back(root_idx, Packed{});
    while (!stack.empty()) {
        auto [idx, code] = stack.back();
        stack.pop_back();
        const BuildNode& node = nodes[idx];
        if (node.symbol >= 0) {
            if (code.len >= 96) throw CodecError("huffman codeword depth exceeds capacity");
            table.codes_[node.symbol] = code;
            table.insert_code(code, node.symbol);
            continue;
        }
        for (int k = 2; k >= 0; --k) {
            Packed extended = code;
            extended.push_back(static_cast<std::uint8_t>(k));
            stack.emplace_back(node.child[k], extended);
        }
    }
    return table;
}

HuffmanTable HuffmanTable::from_codewords(const std::array<TritSequence, 256>& codes) {
    HuffmanTable table;
    table.trie_.emplace_back();
    for (int b = 0; b < 256; ++b) {
        Packed packed;
        if (codes[b].empty()) throw CodecError("empty huffman codeword");
        if (codes[b].size() >= 96) throw CodecError("huffman codeword depth exceeds capacity");
        for (Trit t : codes[b]) packed.push_back(t.value());
        table.codes_[b] = packed;
        table.insert_code(packed, b);
    }
    return table;
}

void HuffmanTable::insert_code(const Packed& code, std::int32_t symbol) {
    std::int32_t node = 0;
    for (std::size_t i = 0; i < code.len; ++i) {
        if (trie_[node].symbol >= 0) throw CodecError("huffman codewords are not prefix-free");
        const std::uint8_t d = code.digit(i);
        if (trie_[node].child[d] < 0) {
            trie_[node].child[d] = static_cast<std::int32_t>(trie_.size());
            trie_.emplace_back();
        }
        node = trie_[node].child[d];
    }
    if (trie_[node].symbol >= 0 || trie_[node].child != std::array<std::int32_t, 3>{-1, -1, -1}) {
        throw CodecError("huffman codewords are not prefix-free");
    }
    trie_[node].symbol = symbol;
}

TritSequence HuffmanTable::code(std::uint8_t symbol) const {
    TritSequence out;
    const Packed& p = codes_[symbol];
    out.reserve(p.len);
    for (std::size_t i = 0; i < p.len; ++i) out.push_back(Trit(p.digit(i)));
    return out;
}

std::size_t HuffmanTable::code_length(std::uint8_t symbol) const { return codes_[symbol].len; }

TritSequence HuffmanTable::padding_code() const {
    TritSequence out;
    if (!has_padding_code_) return out;
    const Packed& p = codes_[kPaddingSymbol];
    out.reserve(p.len);
    for (std::size_t i = 0; i < p.len; ++i) out.push_back(Trit(p.digit(i)));
    return out;
}

TritSequence HuffmanTable::encode(std::span<const std::uint8_t> data) const {
    TritSequence out;
    std::size_t total = 0;
    for (std::uint8_t b : data) total += codes_[b].len;
    out.reserve(total);
    for (std::uint8_t b : data) {
        const Packed& p = codes_[b];
        for (std::size_t i = 0; i < p.len; ++i) out.push_back(Trit(p.digit(i)));
    }
    return out;
}

std::vector<std::uint8_t> HuffmanTable::decode(const TritSequence& trits) const {
    std::vector<std::uint8_t> out;
    std::int32_t node = 0;
    for (std::size_t i = 0; i < trits.size(); ++i) {
        const std::int32_t next = trie_[node].child[trits[i].value()];
        if (next < 0) {
            throw DanglingCodeword("trit stream entered an unoccupied branch at position " +
                                   std::to_string(i));
        }
        node = next;
        if (trie_[node].symbol >= 0) {
            if (trie_[node].symbol == kPaddingSymbol) {
                throw DanglingCodeword("trit stream completed the reserved padding codeword");
            }
            out.push_back(static_cast<std::uint8_t>(trie_[node].symbol));
            node = 0;
        }
    }
    // A trailing partial codeword is the expected residue of base padding.
    return out;
}

bool HuffmanTable::operator==(const HuffmanTable& other) const {
    for (int b = 0; b < 256; ++b) {
        if (codes_[b].len != other.codes_[b].len) return false;
        for (std::size_t i = 0; i < codes_[b].len; ++i) {
            if (codes_[b].digit(i) != other.codes_[b].digit(i)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Rotational mapping

namespace {
// Next base = (prev + 1 + trit) mod 4 walks the cyclic order A->C->G->T
// starting just after prev, so the output base always differs from prev.
inline Nucleotide rotate(Nucleotide prev, std::uint8_t trit) {
    return static_cast<Nucleotide>((static_cast<std::uint8_t>(prev) + 1 + trit) & 3);
}
}  // namespace

NucleotideSequence rotational_encode(const TritSequence& trits, Nucleotide prev) {
    NucleotideSequence out;
    out.reserve(trits.size());
    for (Trit t : trits) {
        prev = rotate(prev, t.value());
        out.push_back(prev);
    }
    return out;
}

TritSequence rotational_decode(const NucleotideSequence& seq, Nucleotide prev) {
    TritSequence out;
    out.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const int diff = (static_cast<int>(seq[i]) - static_cast<int>(prev) + 4) & 3;
        if (diff == 0) {
            throw InvalidSequence("repeated base at position " + std::to_string(i));
        }
        out.push_back(Trit(diff - 1));
        prev = seq[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Goldman pipeline

GoldmanEncoded encode_goldman(std::span<const std::uint8_t> data) {
    HuffmanTable table = HuffmanTable::from_histogram(histogram_of(data));
    NucleotideSequence bases = rotational_encode(table.encode(data));
    return {std::move(table), std::move(bases)};
}

std::vector<std::uint8_t> decode_goldman(const HuffmanTable& table,
                                         const NucleotideSequence& bases) {
    return table.decode(rotational_decode(bases));
}

// ---------------------------------------------------------------------------
// Packetization

std::vector<Plasmid> packetize(const NucleotideSequence& seq, std::string file_id,
                               std::size_t plasmid_len) {
    if (plasmid_len == 0) throw std::invalid_argument("plasmid_len must be positive");
    const std::uint32_t total =
        static_cast<std::uint32_t>((seq.size() + plasmid_len - 1) / plasmid_len);
    std::vector<Plasmid> out;
    out.reserve(total);
    for (std::uint32_t i = 0; i < total; ++i) {
        Plasmid p;
        p.file_id = file_id;
        p.index = i;
        p.total = total;
        const std::size_t begin = static_cast<std::size_t>(i) * plasmid_len;
        const std::size_t end = std::min(begin + plasmid_len, seq.size());
        p.bases.assign(seq.begin() + begin, seq.begin() + end);
        p.bases.resize(plasmid_len, Nucleotide::A);
        out.push_back(std::move(p));
    }
    return out;
}

NucleotideSequence reassemble(std::span<const Plasmid> plasmids,
                              std::uint64_t payload_len_bases) {
    if (plasmids.empty()) {
        if (payload_len_bases != 0) throw MissingPlasmid({0});
        return {};
    }
    const std::uint32_t total = plasmids.front().total;
    const std::size_t plasmid_len = plasmids.front().bases.size();
    if (plasmid_len == 0) throw CodecError("plasmid with empty sequence");
    std::vector<const Plasmid*> slot(total, nullptr);
    for (const Plasmid& p : plasmids) {
        if (p.total != total) throw CodecError("plasmids disagree on total count");
        if (p.bases.size() != plasmid_len) throw CodecError("plasmids disagree on length");
        if (p.index >= total) throw CodecError("plasmid index out of range");
        if (!slot[p.index]) slot[p.index] = &p;
    }
    std::vector<std::uint32_t> missing;
    for (std::uint32_t i = 0; i < total; ++i) {
        if (!slot[i]) missing.push_back(i);
    }
    if (!missing.empty()) throw MissingPlasmid(std::move(missing));
    if (payload_len_bases > static_cast<std::uint64_t>(total) * plasmid_len ||
        (total > 0 && payload_len_bases <= static_cast<std::uint64_t>(total - 1) * plasmid_len)) {
        throw CodecError("payload length inconsistent with plasmid count");
    }
    NucleotideSequence out;
    out.reserve(static_cast<std::size_t>(total) * plasmid_len);
    for (std::uint32_t i = 0; i < total; ++i) {
        out.insert(out.end(), slot[i]->bases.begin(), slot[i]->bases.end());
    }
    out.resize(payload_len_bases);
    return out;
}

// ---------------------------------------------------------------------------
// EncodedFile + manifest

std::string_view encoding_name(Encoding e) {
    return e == Encoding::Basic ? "basic" : "goldman";
}

Encoding encoding_from_name(std::string_view name) {
    if (name == "basic") return Encoding::Basic;
    if (name == "goldman") return Encoding::Goldman;
    throw std::invalid_argument("unknown encoding: " + std::string(name));
}

EncodedFile EncodedFile::encode(std::span<const std::uint8_t> data, Encoding encoding,
                                std::string file_id, std::size_t plasmid_len) {
    if (file_id.empty() || file_id.find_first_of(" \t\r\n") != std::string::npos) {
        throw std::invalid_argument("file_id must be non-empty without whitespace");
    }
    EncodedFile out;
    out.encoding = encoding;
    out.file_id = file_id;
    out.payload_len_bytes = data.size();
    out.plasmid_len = plasmid_len;
    NucleotideSequence bases;
    if (encoding == Encoding::Basic) {
        bases = encode_basic(data);
    } else {
        GoldmanEncoded enc = encode_goldman(data);
        out.huffman = std::move(enc.table);
        bases = std::move(enc.bases);
    }
    out.payload_len_bases = bases.size();
    out.plasmids = packetize(bases, std::move(file_id), plasmid_len);
    return out;
}

std::vector<std::uint8_t> EncodedFile::decode() const {
    NucleotideSequence bases = reassemble(plasmids, payload_len_bases);
    std::vector<std::uint8_t> data;
    if (encoding == Encoding::Basic) {
        data = decode_basic(bases);
    } else {
        if (!huffman) throw CodecError("goldman file lacks its huffman table");
        data = decode_goldman(*huffman, bases);
    }
    if (data.size() != payload_len_bytes) {
        throw CodecError("decoded byte count " + std::to_string(data.size()) +
                         " does not match header " + std::to_string(payload_len_bytes));
    }
    return data;
}

namespace {

constexpr std::string_view kManifestMagic = "bnarc-manifest 1";
constexpr std::string_view kBitBaseMap = "00=A 01=C 10=G 11=T";

std::string hex_byte(int b) {
    static const char digits[] = "0123456789abcdef";
    return {digits[(b >> 4) & 15], digits[b & 15]};
}

int parse_hex_byte(std::string_view s) {
    if (s.size() != 2) throw CodecError("malformed codeword symbol");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw CodecError("malformed codeword symbol");
    };
    return nibble(s[0]) * 16 + nibble(s[1]);
}

std::string expect_line(std::istream& is, std::string_view what) {
    std::string line;
    if (!std::getline(is, line)) {
        throw CodecError("manifest truncated while reading " + std::string(what));
    }
    return line;
}

std::string expect_field(std::istream& is, std::string_view key) {
    std::string line = expect_line(is, key);
    const std::string prefix = std::string(key) + ": ";
    if (line.rfind(prefix, 0) != 0) {
        throw CodecError("manifest expected field '" + std::string(key) + "', got '" + line + "'");
    }
    return line.substr(prefix.size());
}

std::uint64_t parse_u64(const std::string& s, std::string_view what) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw CodecError("manifest field " + std::string(what) + " is not an integer: " + s);
    }
}

}  // namespace

void EncodedFile::write_manifest(std::ostream& os) const {
    os << kManifestMagic << '\n';
    os << "file_id: " << file_id << '\n';
    os << "encoding: " << encoding_name(encoding) << '\n';
    os << "payload_len_bytes: " << payload_len_bytes << '\n';
    os << "payload_len_bases: " << payload_len_bases << '\n';
    os << "plasmid_len: " << plasmid_len << '\n';
    os << "total_plasmids: " << plasmids.size() << '\n';
    os << "bit_base_map: " << kBitBaseMap << '\n';
    if (encoding == Encoding::Goldman) {
        if (!huffman) throw CodecError("goldman file lacks its huffman table");
        os << "huffman_codewords: 256\n";
        for (int b = 0; b < 256; ++b) {
            os << hex_byte(b) << ' ';
            for (Trit t : huffman->code(static_cast<std::uint8_t>(b))) {
                os << static_cast<char>('0' + t.value());
            }
            os << '\n';
        }
    }
    os << "sequences:\n";
    for (const Plasmid& p : plasmids) {
        os << to_string(p.bases) << '\n';
    }
}

EncodedFile EncodedFile::read_manifest(std::istream& is) {
    if (expect_line(is, "magic") != kManifestMagic) {
        throw CodecError("not a recognized manifest (bad magic line)");
    }
    EncodedFile out;
    out.file_id = expect_field(is, "file_id");
    out.encoding = encoding_from_name(expect_field(is, "encoding"));
    out.payload_len_bytes = parse_u64(expect_field(is, "payload_len_bytes"), "payload_len_bytes");
    out.payload_len_bases = parse_u64(expect_field(is, "payload_len_bases"), "payload_len_bases");
    out.plasmid_len =
        static_cast<std::size_t>(parse_u64(expect_field(is, "plasmid_len"), "plasmid_len"));
    const std::uint64_t total = parse_u64(expect_field(is, "total_plasmids"), "total_plasmids");
    if (expect_field(is, "bit_base_map") != kBitBaseMap) {
        throw CodecError("manifest declares an unsupported bit_base_map");
    }
    if (out.encoding == Encoding::Goldman) {
        if (parse_u64(expect_field(is, "huffman_codewords"), "huffman_codewords") != 256) {
            throw CodecError("manifest must list exactly 256 huffman codewords");
        }
        std::array<TritSequence, 256> codes;
        for (int i = 0; i < 256; ++i) {
            const std::string line = expect_line(is, "huffman codeword");
            const std::size_t space = line.find(' ');
            if (space == std::string::npos) throw CodecError("malformed codeword line: " + line);
            const int sym = parse_hex_byte(std::string_view(line).substr(0, space));
            TritSequence code;
            for (std::size_t k = space + 1; k < line.size(); ++k) {
                if (line[k] < '0' || line[k] > '2') {
                    throw CodecError("malformed codeword digits: " + line);
                }
                code.push_back(Trit(line[k] - '0'));
            }
            codes[sym] = std::move(code);
        }
        out.huffman = HuffmanTable::from_codewords(codes);
    }
    if (expect_line(is, "sequences header") != "sequences:") {
        throw CodecError("manifest expected 'sequences:' section");
    }
    out.plasmids.reserve(static_cast<std::size_t>(total));
    std::string line;
    std::uint32_t index = 0;
    while (index < total && std::getline(is, line)) {
        if (line.empty()) continue;
        Plasmid p;
        p.file_id = out.file_id;
        p.index = index;
        p.total = static_cast<std::uint32_t>(total);
        p.bases = sequence_from_string(line);
        if (p.bases.size() != out.plasmid_len) {
            throw CodecError("plasmid line " + std::to_string(index) + " has length " +
                             std::to_string(p.bases.size()) + ", expected " +
                             std::to_string(out.plasmid_len));
        }
        out.plasmids.push_back(std::move(p));
        ++index;
    }
    if (index < total) {
        std::vector<std::uint32_t> missing;
        for (std::uint32_t i = index; i < total; ++i) missing.push_back(i);
        throw MissingPlasmid(std::move(missing));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Error injection

NucleotideSequence inject_errors(const NucleotideSequence& seq, const MutationRates& rates,
                                 Pcg32& rng) {
    NucleotideSequence out;
    out.reserve(seq.size() + seq.size() / 16);
    for (Nucleotide base : seq) {
        if (rates.insertion > 0.0 && rng.uniform01() < rates.insertion) {
            out.push_back(static_cast<Nucleotide>(rng.next() & 3));
        }
        if (rates.deletion > 0.0 && rng.uniform01() < rates.deletion) {
            continue;
        }
        if (rates.substitution > 0.0 && rng.uniform01() < rates.substitution) {
            const std::uint8_t b = static_cast<std::uint8_t>(base);
            if (rng.uniform01() < rates.transition_fraction) {
                // Transitions pair A<->G and C<->T: toggle the purine bit.
                out.push_back(static_cast<Nucleotide>(b ^ 2));
            } else {
                // Transversions swap chemical class; two candidates each.
                const std::uint8_t other = (rng.next() >> 31) & 1;
                const std::uint8_t target =
                    (b % 2 == 0) ? static_cast<std::uint8_t>(1 + 2 * other)
                                 : static_cast<std::uint8_t>(2 * other);
                out.push_back(static_cast<Nucleotide>(target));
            }
            continue;
        }
        out.push_back(base);
    }
    return out;
}

}  // namespace bna::codec
