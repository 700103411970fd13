// Minimal library usage: read a JSON-Lines comment log, print one line per
// user with its label and the indicators that fired.

#include <fstream>
#include <iostream>

#include "spamscope/spamscope.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: score_file comments.jsonl\n";
        return 1;
    }
    std::ifstream in(argv[1]);
    if (!in) {
        std::cerr << "cannot open " << argv[1] << "\n";
        return 1;
    }
    try {
        auto parsed = spamscope::parse_jsonl(in);
        auto logs = spamscope::group_by_user(std::move(parsed.records));
        spamscope::RuleConfig cfg;
        for (const auto& log : logs) {
            auto v = spamscope::classify(spamscope::feature_vector(log), cfg);
            std::cout << v.user_id << '\t' << spamscope::to_string(v.label);
            for (auto i : v.triggered) std::cout << ' ' << spamscope::to_string(i);
            std::cout << '\n';
        }
    } catch (const spamscope::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
