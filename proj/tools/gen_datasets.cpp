// Writes the bundled datasets into a target directory (default: data/).
// The files are checked in; this tool exists so they can be audited and
// regenerated from first principles.
//
//   mortgage.arff       six-record worked example (one numeric attribute)
//   tictactoe.arff      all 958 legal tic-tac-toe end positions, X moving
//                       first: 626 X wins, 316 O wins, 16 draws. Matches the
//                       classic UCI corpus composition; rows are emitted in
//                       lexicographic board order.
//   synth_numeric.csv   2310 synthetic records, 19 numeric attributes
//                       (12 informative, 7 noise, ~1% missing in the last 3),
//                       7 balanced classes. Fixed seed, so regeneration is
//                       reproducible bit for bit with one libm; the checked-in
//                       file is the canonical copy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "fastforest/rng.hpp"

namespace {

constexpr std::array<std::array<int, 3>, 8> kLines = {{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},  // rows
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},  // columns
    {0, 4, 8}, {2, 4, 6},             // diagonals
}};

// Board cells: 'x', 'o', 'b' (blank).
bool has_line(const std::string& board, char side) {
    return std::any_of(kLines.begin(), kLines.end(), [&](const auto& line) {
        return board[line[0]] == side && board[line[1]] == side && board[line[2]] == side;
    });
}

// Play every game to its end and keep the distinct final boards. A finished
// board determines its own outcome: the side holding a line won (both sides
// can never hold one, play stops at the first), otherwise it is a full-board
// draw.
void enumerate_endgames(std::string& board, char to_move, std::set<std::string>& finals) {
    for (int cell = 0; cell < 9; ++cell) {
        if (board[cell] != 'b') continue;
        board[cell] = to_move;
        if (has_line(board, to_move) || board.find('b') == std::string::npos)
            finals.insert(board);
        else
            enumerate_endgames(board, to_move == 'x' ? 'o' : 'x', finals);
        board[cell] = 'b';
    }
}

void write_mortgage(const std::filesystem::path& path) {
    std::ofstream out(path);
    out << "% Six-record worked example: mortgage approval by applicant age.\n"
           "@relation mortgage\n"
           "@attribute age numeric\n"
           "@attribute approved {yes,no}\n"
           "@data\n"
           "25,yes\n"
           "27,no\n"
           "30,no\n"
           "35,no\n"
           "40,yes\n"
           "45,yes\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_tictactoe(const std::filesystem::path& path) {
    std::string board(9, 'b');
    std::set<std::string> finals;
    enumerate_endgames(board, 'x', finals);

    std::size_t x_wins = 0;
    std::size_t o_wins = 0;
    std::size_t draws = 0;
    for (const auto& b : finals) {
        if (has_line(b, 'x'))
            ++x_wins;
        else if (has_line(b, 'o'))
            ++o_wins;
        else
            ++draws;
    }
    if (finals.size() != 958 || x_wins != 626 || o_wins != 316 || draws != 16)
        throw std::runtime_error("tic-tac-toe enumeration is off: " +
                                 std::to_string(finals.size()) + " boards, " +
                                 std::to_string(x_wins) + "/" + std::to_string(o_wins) + "/" +
                                 std::to_string(draws));

    std::ofstream out(path);
    out << "% All legal tic-tac-toe end positions with x moving first.\n"
           "% Class is positive iff x holds a completed line.\n"
           "@relation tictactoe\n";
    static const char* kCells[9] = {"top-left",    "top-middle",    "top-right",
                                    "middle-left", "middle-middle", "middle-right",
                                    "bottom-left", "bottom-middle", "bottom-right"};
    for (const auto* cell : kCells) out << "@attribute " << cell << " {x,o,b}\n";
    out << "@attribute class {positive,negative}\n@data\n";
    for (const auto& b : finals) {
        for (const char c : b) out << c << ',';
        out << (has_line(b, 'x') ? "positive" : "negative") << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_synth_numeric(const std::filesystem::path& path) {
    constexpr std::size_t kClasses = 7;
    constexpr std::size_t kPerClass = 330;
    constexpr std::size_t kAttrs = 19;
    constexpr std::size_t kInformative = 12;

    fastforest::RngStream rng(0xF00DF00DULL);
    auto gauss = [&rng] {
        // Box-Muller; 1-unit() keeps the log argument away from zero.
        const double u1 = 1.0 - rng.unit();
        const double u2 = rng.unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    };

    // Class centers in the informative dimensions; noise dimensions are
    // identical for every class.
    std::vector<std::array<double, kInformative>> centers(kClasses);
    for (auto& center : centers)
        for (auto& c : center) c = 2.0 * gauss();

    std::ofstream out(path);
    for (std::size_t a = 0; a < kAttrs; ++a) out << 'f' << a + 1 << ',';
    out << "class\n";
    char buf[32];
    for (std::size_t cls = 0; cls < kClasses; ++cls) {
        for (std::size_t i = 0; i < kPerClass; ++i) {
            for (std::size_t a = 0; a < kAttrs; ++a) {
                const double base = a < kInformative ? centers[cls][a] : 0.0;
                const double v = base + gauss();
                const bool missing = a >= kAttrs - 3 && rng.below(100) == 0;
                if (!missing) {
                    std::snprintf(buf, sizeof buf, "%.4f", v);
                    out << buf;
                }
                out << ',';
            }
            out << 'c' << cls + 1 << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
    try {
        std::filesystem::create_directories(dir);
        write_mortgage(dir / "mortgage.arff");
        write_tictactoe(dir / "tictactoe.arff");
        write_synth_numeric(dir / "synth_numeric.csv");
    } catch (const std::exception& e) {
        std::cerr << "gen_datasets: " << e.what() << '\n';
        return 1;
    }
    std::cout << "wrote mortgage.arff, tictactoe.arff, synth_numeric.csv to " << dir.string()
              << '\n';
    return 0;
}
