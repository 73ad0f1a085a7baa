#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef GIRNET_CLI_PATH
#error "GIRNET_CLI_PATH must point at the built binary"
#endif

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string stdout_text;
};

CliResult run_cli(const std::string& args) {
    const std::string out_file = (fs::temp_directory_path() / "girnet_cli_out.txt").string();
    const std::string cmd = std::string(GIRNET_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path workdir() {
    const fs::path dir = fs::temp_directory_path() / "girnet_cli_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const std::string& name, int epochs = 2, int seed = 0,
                      const std::string& extra_model = "") {
    const fs::path dir = workdir();
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << R"({
  "model": {"kind": "girnet", "m": 2, "d": 16, "d_prime": 8, "d_emb": 8, "prim_head": "token-tag")"
        << extra_model << R"(},
  "optimizer": {"lr": 0.001, "epochs": )"
        << epochs << R"(, "batch_size": 8, "seed": )" << seed << R"(},
  "loss": {"alpha": [1.0, 1.0], "lambda": 0.0},
  "data": {
    "dir": ")" << (dir / "data").string() << R"(",
    "synthetic": {"task": "codeswitch-tag", "primary_train": 64, "primary_test": 32, "aux_count": 64},
    "primary_train": ")" << (dir / "data/primary_train.tsv").string() << R"(",
    "primary_test": ")" << (dir / "data/primary_test.tsv").string() << R"(",
    "aux": [")" << (dir / "data/aux_a.tsv").string() << R"(", ")"
        << (dir / "data/aux_b.tsv").string() << R"("],
    "routing": ")" << (dir / "data/primary_test.routing.tsv").string() << R"("
  },
  "output": {
    "checkpoint": ")" << (dir / "model.ckpt").string() << R"(",
    "metrics": ")" << (dir / "metrics.jsonl").string() << R"(",
    "trace": ")" << (dir / "trace.csv").string() << R"("
  }
})";
    return path;
}

} // namespace

TEST_CASE("cli pipeline: gen, train, eval, trace") {
    const fs::path dir = workdir();
    fs::remove_all(dir / "data");
    const fs::path cfg = write_config("cfg.json");

    SUBCASE("gen writes five deterministic files") {
        CliResult gen = run_cli("gen --config " + cfg.string());
        CHECK(gen.exit_code == 0);
        const char* names[] = {"aux_a.tsv", "aux_b.tsv", "primary_train.tsv", "primary_test.tsv",
                               "primary_test.routing.tsv"};
        std::map<std::string, std::string> first;
        for (const char* n : names) {
            CHECK(fs::exists(dir / "data" / n));
            first[n] = read_file(dir / "data" / n);
        }
        CliResult again = run_cli("gen --config " + cfg.string());
        CHECK(again.exit_code == 0);
        for (const char* n : names) CHECK(read_file(dir / "data" / n) == first[n]);
    }

    SUBCASE("training is deterministic and logs line-delimited JSON") {
        run_cli("gen --config " + cfg.string());
        CliResult t1 = run_cli("train --config " + cfg.string());
        REQUIRE(t1.exit_code == 0);
        const std::string ckpt1 = read_file(dir / "model.ckpt");
        const std::string metrics1 = read_file(dir / "metrics.jsonl");

        // every metrics line parses as JSON with the loss components
        std::istringstream lines(metrics1);
        std::string line;
        int n_lines = 0;
        while (std::getline(lines, line)) {
            const auto j = nlohmann::json::parse(line);
            CHECK(j.contains("loss_all"));
            CHECK(j.contains("loss_prim"));
            CHECK(j.contains("loss_aux"));
            CHECK(j.contains("loss_reg"));
            CHECK(j.contains("dev_accuracy"));
            ++n_lines;
        }
        CHECK(n_lines == 2);

        CliResult t2 = run_cli("train --config " + cfg.string());
        REQUIRE(t2.exit_code == 0);
        CHECK(read_file(dir / "model.ckpt") == ckpt1);
        CHECK(read_file(dir / "metrics.jsonl") == metrics1);

        // loss decreases between the first epochs on the synthetic task
        std::istringstream reread(metrics1);
        std::getline(reread, line);
        const double e0 = nlohmann::json::parse(line)["loss_all"];
        std::getline(reread, line);
        const double e1 = nlohmann::json::parse(line)["loss_all"];
        CHECK(e1 <= e0);

        SUBCASE("eval prints metrics and agreement, identically across runs") {
            CliResult e1r = run_cli("eval --config " + cfg.string());
            REQUIRE(e1r.exit_code == 0);
            const auto j = nlohmann::json::parse(e1r.stdout_text);
            CHECK(j.contains("accuracy"));
            CHECK(j.contains("macro_f1"));
            CHECK(j.contains("macro_precision"));
            CHECK(j.contains("macro_recall"));
            CHECK(j.contains("agreement"));
            CliResult e2r = run_cli("eval --config " + cfg.string());
            CHECK(e2r.stdout_text == e1r.stdout_text);
        }

        SUBCASE("trace emits a header and one row per unmasked position") {
            CliResult tr = run_cli("trace --config " + cfg.string());
            REQUIRE(tr.exit_code == 0);
            std::ifstream csv(dir / "trace.csv");
            std::string header;
            std::getline(csv, header);
            CHECK(header == "seq,pos,token,g1,g2,skip");
            long rows = 0, expected = 0;
            while (std::getline(csv, header)) {
                ++rows;
                // skip column = 1 - g1 - g2 within 1e-9
                std::istringstream f(header);
                std::string fld;
                std::vector<std::string> fields;
                while (std::getline(f, fld, ',')) fields.push_back(fld);
                REQUIRE(fields.size() == 6);
                const double g1 = std::stod(fields[3]), g2 = std::stod(fields[4]),
                             sk = std::stod(fields[5]);
                CHECK(std::fabs(1.0 - g1 - g2 - sk) < 1e-5); // printed at 6 decimals
            }
            std::ifstream tsv(dir / "data/primary_test.tsv");
            while (std::getline(tsv, header)) {
                std::istringstream t(header.substr(0, header.find('\t')));
                std::string tok;
                while (t >> tok) ++expected;
            }
            CHECK(rows == expected);
        }

        SUBCASE("checkpoint shape mismatch exits 4") {
            const fs::path other = write_config("cfg_wide.json", 2, 0, ", \"d\": 24");
            CliResult ev = run_cli("eval --config " + other.string());
            CHECK(ev.exit_code == 4);
        }
    }

    SUBCASE("zero epochs leaves the checkpoint at initialization") {
        run_cli("gen --config " + cfg.string());
        const fs::path zero_cfg = write_config("cfg_zero.json", 0);
        CliResult t = run_cli("train --config " + zero_cfg.string());
        REQUIRE(t.exit_code == 0);
        const std::string ckpt = read_file(dir / "model.ckpt");

        // an independently built model with the same seed matches bit for bit
        CliResult t2 = run_cli("train --config " + zero_cfg.string());
        CHECK(read_file(dir / "model.ckpt") == ckpt);
        CHECK(fs::file_size(dir / "metrics.jsonl") == 0);
    }
}

TEST_CASE("cli validation and exit codes") {
    const fs::path cfg = write_config("cfg_exit.json");

    SUBCASE("alpha length mismatch is rejected before any computation") {
        CliResult r = run_cli("train --config " + cfg.string() + " --loss.alpha [1.0]");
        CHECK(r.exit_code == 1);
        CHECK(r.stdout_text.find("alpha") != std::string::npos);
    }

    SUBCASE("unknown model kind is a config error") {
        CliResult r = run_cli("eval --config " + cfg.string() + " --model.kind transformer");
        CHECK(r.exit_code == 1);
    }

    SUBCASE("unwritable output path exits 2") {
        run_cli("gen --config " + cfg.string());
        CliResult r = run_cli("train --config " + cfg.string() +
                              " --output.metrics /dev/null/metrics.jsonl --optimizer.epochs 0");
        CHECK(r.exit_code == 2);
    }

    SUBCASE("zero corpus count is rejected") {
        CliResult r = run_cli("gen --config " + cfg.string() + " --data.synthetic.primary_train 0");
        CHECK(r.exit_code == 1);
    }

    SUBCASE("gradcheck passes and the corrupt hook exits 5") {
        CliResult ok = run_cli("gradcheck --config " + cfg.string());
        CHECK(ok.exit_code == 0);
        CHECK(ok.stdout_text.find("max relative error") != std::string::npos);
        CliResult bad = run_cli("gradcheck --config " + cfg.string() + " --corrupt-grad");
        CHECK(bad.exit_code == 5);
    }

    SUBCASE("GIRNET_SEED overrides the config seed") {
        const fs::path dir = workdir();
        run_cli("gen --config " + cfg.string());
        run_cli("train --config " + cfg.string());
        const std::string base = read_file(dir / "model.ckpt");
        CliResult r = run_cli("train --config " + cfg.string());
        CHECK(read_file(dir / "model.ckpt") == base);
        setenv("GIRNET_SEED", "99", 1);
        CliResult seeded = run_cli("train --config " + cfg.string());
        unsetenv("GIRNET_SEED");
        REQUIRE(seeded.exit_code == 0);
        CHECK(read_file(dir / "model.ckpt") != base);
    }
}

TEST_CASE("cli handles the classification task shape") {
    const fs::path cfg = write_config("cfg_classify.json", 1);
    const std::string overrides =
        " --data.synthetic.task codeswitch-classify"
        " --model.prim_head sequence-classify-last";
    REQUIRE(run_cli("gen --config " + cfg.string() + overrides).exit_code == 0);
    REQUIRE(run_cli("train --config " + cfg.string() + overrides).exit_code == 0);
    CliResult ev = run_cli("eval --config " + cfg.string() + overrides);
    REQUIRE(ev.exit_code == 0);
    const auto j = nlohmann::json::parse(ev.stdout_text);
    CHECK(j["accuracy"].get<double>() >= 0.0);
    CHECK(j["accuracy"].get<double>() <= 1.0);
}

TEST_CASE("cli flag overrides reach nested fields") {
    const fs::path dir = workdir();
    const fs::path cfg = write_config("cfg_override.json");
    run_cli("gen --config " + cfg.string());
    CliResult r = run_cli("train --config " + cfg.string() +
                          " --loss.lambda 0.05 --optimizer.epochs 1");
    REQUIRE(r.exit_code == 0);
    std::ifstream metrics(dir / "metrics.jsonl");
    std::string line;
    std::getline(metrics, line);
    const auto j = nlohmann::json::parse(line);
    CHECK(j["loss_reg"].get<double>() > 0.0);
    int lines = 1;
    while (std::getline(metrics, line)) ++lines;
    CHECK(lines == 1);
}
