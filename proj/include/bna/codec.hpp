#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bna/rng.hpp"

namespace bna::codec {

// ---------------------------------------------------------------------------
// Alphabet

enum class Nucleotide : std::uint8_t { A = 0, C = 1, G = 2, T = 3 };

using NucleotideSequence = std::vector<Nucleotide>;

char to_char(Nucleotide n);
Nucleotide nucleotide_from_char(char c);  // throws std::invalid_argument
std::string to_string(const NucleotideSequence& seq);
NucleotideSequence sequence_from_string(std::string_view text);

// Ternary digit, range-checked at construction.
class Trit {
public:
    explicit Trit(int v);
    std::uint8_t value() const { return v_; }
    friend bool operator==(Trit a, Trit b) { return a.v_ == b.v_; }

private:
    std::uint8_t v_;
};

using TritSequence = std::vector<Trit>;

// ---------------------------------------------------------------------------
// Errors

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// decode_basic input whose length is not a multiple of four bases.
struct LengthNotMultipleOfFour : CodecError {
    using CodecError::CodecError;
};

// A physically impossible sequence (adjacent equal bases) reached the decoder.
struct InvalidSequence : CodecError {
    using CodecError::CodecError;
};

// A trit stream terminated inside the reserved padding codeword, or entered a
// branch no codeword occupies.
struct DanglingCodeword : CodecError {
    using CodecError::CodecError;
};

// Reassembly saw an incomplete plasmid set; lists the absent indices.
struct MissingPlasmid : CodecError {
    explicit MissingPlasmid(std::vector<std::uint32_t> indices);
    std::vector<std::uint32_t> missing;
};

// ---------------------------------------------------------------------------
// Basic encoding: two bits per base, MSB-first, 00=A 01=C 10=G 11=T.

NucleotideSequence encode_basic(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> decode_basic(const NucleotideSequence& seq);

// ---------------------------------------------------------------------------
// Ternary Huffman over byte symbols.

using ByteHistogram = std::array<std::uint64_t, 256>;

ByteHistogram histogram_of(std::span<const std::uint8_t> data);

class HuffmanTable {
public:
    // Builds the code for 256 byte symbols plus one zero-frequency padding
    // leaf (so the symbol count satisfies the ternary merge arity). Ties are
    // merged deterministically: real leaves by byte value, then the padding
    // leaf, then internal nodes in creation order.
    static HuffmanTable from_histogram(const ByteHistogram& hist);

    // Rebuilds a table from 256 explicit codewords (manifest ingestion).
    static HuffmanTable from_codewords(const std::array<TritSequence, 256>& codes);

    TritSequence code(std::uint8_t symbol) const;
    std::size_t code_length(std::uint8_t symbol) const;

    // Codeword of the padding leaf; empty when the table was rebuilt from
    // explicit codewords (the padding branch is then simply unoccupied).
    TritSequence padding_code() const;

    TritSequence encode(std::span<const std::uint8_t> data) const;

    // Trailing trits that do not complete a codeword are discarded (they are
    // the tail of base-padding). Completing the padding codeword, or entering
    // an unoccupied branch, throws DanglingCodeword.
    std::vector<std::uint8_t> decode(const TritSequence& trits) const;

    bool operator==(const HuffmanTable& other) const;

private:
    // Codewords are packed two bits per trit; ternary Huffman depth over 257
    // symbols with 64-bit frequencies cannot exceed the 96-trit capacity.
    struct Packed {
        std::array<std::uint64_t, 3> words{};
        std::uint8_t len = 0;
        void push_back(std::uint8_t trit);
        std::uint8_t digit(std::size_t i) const;
    };

    struct TrieNode {
        std::array<std::int32_t, 3> child{-1, -1, -1};
        std::int32_t symbol = -1;  // 0..255 leaf, 256 padding leaf
    };

    void insert_code(const Packed& code, std::int32_t symbol);
    void append_packed(const Packed& code, std::vector<std::uint8_t>& out) const;

    std::array<Packed, 257> codes_{};  // index 256 = padding leaf
    bool has_padding_code_ = false;
    std::vector<TrieNode> trie_;

    friend class HuffmanTableTestPeer;
};

// ---------------------------------------------------------------------------
// Rotational base mapping: trit t selects the t-th base after the previous
// base in the cyclic order A->C->G->T->A. Output never repeats a base.

NucleotideSequence rotational_encode(const TritSequence& trits,
                                     Nucleotide prev = Nucleotide::A);
TritSequence rotational_decode(const NucleotideSequence& seq,
                               Nucleotide prev = Nucleotide::A);

// ---------------------------------------------------------------------------
// Goldman pipeline: per-input histogram -> ternary Huffman -> rotational map.

struct GoldmanEncoded {
    HuffmanTable table;
    NucleotideSequence bases;
};

GoldmanEncoded encode_goldman(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> decode_goldman(const HuffmanTable& table,
                                         const NucleotideSequence& bases);

// ---------------------------------------------------------------------------
// Plasmid packetization

struct Plasmid {
    std::string file_id;
    std::uint32_t index = 0;
    std::uint32_t total = 0;
    NucleotideSequence bases;

    bool operator==(const Plasmid&) const = default;
};

// Splits a sequence into fixed-length plasmids; the final one is padded with
// Nucleotide::A up to plasmid_len.
std::vector<Plasmid> packetize(const NucleotideSequence& seq, std::string file_id,
                               std::size_t plasmid_len);

// Inverse of packetize. Order-insensitive; requires every index exactly once
// (duplicates of an index are tolerated, absences are not). payload_len_bases
// strips the final plasmid's padding.
NucleotideSequence reassemble(std::span<const Plasmid> plasmids,
                              std::uint64_t payload_len_bases);

// ---------------------------------------------------------------------------
// Whole-file encoding plus the manifest text form.

enum class Encoding { Basic, Goldman };

std::string_view encoding_name(Encoding e);
Encoding encoding_from_name(std::string_view name);  // throws std::invalid_argument

struct EncodedFile {
    Encoding encoding = Encoding::Basic;
    std::string file_id;
    std::uint64_t payload_len_bytes = 0;
    std::uint64_t payload_len_bases = 0;  // base count before packetize padding
    std::size_t plasmid_len = 200;
    std::optional<HuffmanTable> huffman;  // Goldman only
    std::vector<Plasmid> plasmids;

    static EncodedFile encode(std::span<const std::uint8_t> data, Encoding encoding,
                              std::string file_id, std::size_t plasmid_len = 200);

    std::vector<std::uint8_t> decode() const;

    // Round-trippable, deterministic text form: header key/value lines, the
    // bit<->base map (and Goldman codewords) for self-description, then one
    // uppercase ACGT line per plasmid in index order.
    void write_manifest(std::ostream& os) const;
    static EncodedFile read_manifest(std::istream& is);
};

// ---------------------------------------------------------------------------
// Error injection (channel model for robustness studies)

struct MutationRates {
    double insertion = 0.0;
    double deletion = 0.0;
    double substitution = 0.0;
    // Fraction of substitutions drawn as transitions (A<->G, C<->T); the rest
    // are transversions chosen uniformly between the two candidates.
    double transition_fraction = 0.5;
};

NucleotideSequence inject_errors(const NucleotideSequence& seq, const MutationRates& rates,
                                 Pcg32& rng);

}  // namespace bna::codec
