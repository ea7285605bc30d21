// bnarc: encode/decode files as nucleotide plasmid sets and run the
// simulated-archive experiment presets.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bna/config.hpp"
#include "bna/csv.hpp"
#include "bna/engine.hpp"
#include "bna/kernels.hpp"

namespace {

std::vector<std::uint8_t> read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary(const std::string& path, const std::vector<std::uint8_t>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string default_out_path(const std::string& preset) {
    const char* dir = std::getenv("BNARC_OUT_DIR");
    const std::filesystem::path base = dir && *dir ? dir : ".";
    return (base / (preset + ".csv")).string();
}

void select_kernel_or_die(const std::string& name) {
    if (!bna::kernels::select_backend(name)) {
        std::string avail;
        for (const auto& b : bna::kernels::available_backends()) {
            if (!avail.empty()) avail += ", ";
            avail += b;
        }
        throw std::runtime_error("kernel backend '" + name + "' unavailable (have: " + avail +
                                 ")");
    }
}

int run_codec_bench(const std::string& out_path, std::size_t plasmid_len,
                    std::uint64_t payload_seed) {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << "encoding,payload_bytes,bases,bases_per_byte,plasmids,plasmid_len,roundtrip_ok\n";
    const std::uint64_t sizes[] = {1024, 18400};
    int rows = 0;
    for (std::uint64_t size : sizes) {
        const auto payload = bna::engine::synthesize_payload(size, payload_seed);
        for (auto enc : {bna::codec::Encoding::Basic, bna::codec::Encoding::Goldman}) {
            const auto file =
                bna::codec::EncodedFile::encode(payload, enc, "bench", plasmid_len);
            const bool ok = file.decode() == payload;
            out << bna::codec::encoding_name(enc) << ',' << size << ','
                << file.payload_len_bases << ','
                << bna::csv::format(static_cast<double>(file.payload_len_bases) /
                                    static_cast<double>(size))
                << ',' << file.plasmids.size() << ',' << plasmid_len << ','
                << (ok ? 1 : 0) << '\n';
            ++rows;
        }
    }
    std::cout << "codec-bench: " << rows << " rows\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nucleotide archive codec and retrieval simulator"};
    app.require_subcommand(1);

    // encode ------------------------------------------------------------
    std::string enc_in, enc_out, enc_encoding = "basic", enc_file_id;
    std::size_t enc_plasmid_len = 200;
    CLI::App* enc = app.add_subcommand("encode", "encode a file into a plasmid manifest");
    enc->add_option("--in", enc_in, "input file (binary)")->required();
    enc->add_option("--out", enc_out, "manifest output path")->required();
    enc->add_option("--encoding", enc_encoding, "basic | goldman")->capture_default_str();
    enc->add_option("--plasmid-len", enc_plasmid_len, "bases per plasmid")
        ->capture_default_str();
    enc->add_option("--file-id", enc_file_id, "identifier stored in the manifest");

    // decode ------------------------------------------------------------
    std::string dec_in, dec_out;
    CLI::App* dec = app.add_subcommand("decode", "decode a plasmid manifest back to bytes");
    dec->add_option("--in", dec_in, "manifest input path")->required();
    dec->add_option("--out", dec_out, "decoded output path")->required();

    // run ---------------------------------------------------------------
    std::string run_preset, run_config, run_out, run_kernel = "auto";
    std::uint64_t run_seed = 0;
    bool seed_given = false;
    int run_jobs = 1;
    bool run_full = false, run_desk = false;
    std::vector<std::string> run_overrides;
    CLI::App* run = app.add_subcommand("run", "run an experiment preset");
    run->add_option("--preset", run_preset,
                    "positioning | retrieval | content-mgmt | codec-bench")
        ->required();
    run->add_option("--config", run_config, "key = value config file");
    run->add_option("--seed", run_seed, "override sim.seed")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--out", run_out, "output CSV (default $BNARC_OUT_DIR/<preset>.csv)");
    run->add_option("--jobs", run_jobs, "worker threads")->capture_default_str();
    run->add_option("--kernel", run_kernel, "auto | scalar | avx2")->capture_default_str();
    CLI::Option* full_flag = run->add_flag("--full", run_full, "full-size experiment grid");
    run->add_flag("--desk-scale", run_desk, "reduced grid (default)")->excludes(full_flag);
    run->add_option("overrides", run_overrides, "key=value config overrides");

    CLI11_PARSE(app, argc, argv);

    try {
        if (enc->parsed()) {
            const auto payload = read_binary(enc_in);
            const auto encoding = bna::codec::encoding_from_name(enc_encoding);
            std::string file_id = enc_file_id.empty()
                                      ? std::filesystem::path(enc_in).filename().string()
                                      : enc_file_id;
            const auto file =
                bna::codec::EncodedFile::encode(payload, encoding, file_id, enc_plasmid_len);
            std::ofstream out(enc_out, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open output file: " + enc_out);
            file.write_manifest(out);
            if (!out) throw std::runtime_error("write failed: " + enc_out);
            std::cout << "encoded " << payload.size() << " bytes -> " << file.payload_len_bases
                      << " bases, " << file.plasmids.size() << " plasmids ("
                      << bna::codec::encoding_name(encoding) << ")\n";
            return 0;
        }

        if (dec->parsed()) {
            std::ifstream in(dec_in);
            if (!in) throw std::runtime_error("cannot open input file: " + dec_in);
            const auto file = bna::codec::EncodedFile::read_manifest(in);
            const auto payload = file.decode();
            write_binary(dec_out, payload);
            std::cout << "decoded " << file.plasmids.size() << " plasmids -> "
                      << payload.size() << " bytes ("
                      << bna::codec::encoding_name(file.encoding) << ")\n";
            return 0;
        }

        // run
        select_kernel_or_die(run_kernel);
        const std::string out_path = run_out.empty() ? default_out_path(run_preset) : run_out;

        bna::engine::SimConfig cfg = bna::config::build_sim_config(run_config, run_overrides);
        if (seed_given) {
            cfg.seed = run_seed;
            cfg.validate();
        }

        if (run_preset == "codec-bench") {
            return run_codec_bench(out_path, cfg.plasmid_len, cfg.payload_seed);
        }

        std::vector<bna::engine::RunSpec> plan;
        bna::engine::RunSpec::Kind kind;
        if (run_preset == "positioning") {
            kind = bna::engine::RunSpec::Kind::Positioning;
            if (!run_full) {
                // Desk scale: one destination and one release point per circle.
                cfg.positioning.dest_points = 1;
                cfg.positioning.start_points = 1;
            }
            plan = bna::engine::plan_circle_sweep(cfg);
        } else if (run_preset == "retrieval" || run_preset == "content-mgmt") {
            kind = bna::engine::RunSpec::Kind::Retrieval;
            if (run_preset == "content-mgmt") {
                cfg.layout.mode = bna::archive::LayoutMode::TwoOutside;
            }
            const auto grid = run_full ? bna::engine::SweepGrid::full()
                                       : bna::engine::SweepGrid::desk_scale();
            plan = bna::engine::plan_parameter_sweep(cfg, grid);
        } else {
            throw std::runtime_error("unknown preset: " + run_preset);
        }

        const auto records = bna::engine::run_plan(plan, run_jobs);
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        if (kind == bna::engine::RunSpec::Kind::Positioning) {
            bna::engine::write_positioning_csv(out, records);
        } else {
            bna::engine::write_retrieval_csv(out, records);
        }
        if (!out) throw std::runtime_error("write failed: " + out_path);
        std::cout << bna::engine::summary_line(kind, run_preset, records) << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
