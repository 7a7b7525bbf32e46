#include <doctest.h>

#include <algorithm>
#include <random>

#include "lexcourt/error.hpp"
#include "lexcourt/statutes.hpp"
#include "lexcourt/textproc.hpp"
#include "support.hpp"

using namespace lexcourt;

namespace {

const std::string kIrpa = "immigration_and_refugee_protection_act";
const std::string kFca = "federal_courts_act";

StatuteCatalog small_catalog() {
    return StatuteCatalog::from_titles({"Immigration and Refugee Protection Act (S.C. 2001, c. 27)",
                                        "Federal Courts Act (R.S.C., 1985, c. F-7)", "Federal Courts Rules (SOR/98-106)",
                                        "Income Tax Act (R.S.C., 1985, c. 1 (5th Supp.))"});
}

std::vector<std::string> ids_of(const std::vector<StatuteMention>& mentions) {
    std::vector<std::string> out;
    for (const auto& m : mentions) out.push_back(m.statute_id);
    return out;
}

std::vector<std::string> sections_of(const std::vector<SectionMatch>& matches) {
    std::vector<std::string> out;
    for (const auto& m : matches) out.push_back(m.section);
    return out;
}

std::string join_passages(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += p + "\n\n";
    return s;
}

}  // namespace

TEST_CASE("clean_title") {
    CHECK(clean_title("Income Tax Act (R.S.C., 1985, c. 1) [Repealed]") == "Income Tax Act");
    CHECK(clean_title("Federal Courts Rules") == "Federal Courts Rules");
    CHECK(clean_title("Canada Evidence") == "Canada Evidence");
    CHECK(clean_title("Order Fixing the Date") == "Order");
    CHECK(clean_title("Access to Information ACT extra") == "Access to Information ACT");
    CHECK(clean_title("  Canada Evidence  ") == "Canada Evidence");
    for (const char* t : {"Income Tax Act (R.S.C.)", "a b c", "Rules of Court", "  x  ", "Acts and Orders"}) {
        CHECK(clean_title(clean_title(t)) == clean_title(t));
    }
}

TEST_CASE("make_acronym") {
    CHECK(make_acronym("Immigration and Refugee Protection Act") == std::optional<std::string>("IRPA"));
    CHECK(make_acronym("Federal Courts Act") == std::optional<std::string>("FCA"));
    CHECK_FALSE(make_acronym("act").has_value());
    CHECK_FALSE(make_acronym("Act").has_value());
    for (const char* t : {"Immigration and Refugee Protection Act", "a B c D", "X Y", "lower only", "Émile Zola Act"}) {
        const auto a = make_acronym(t);
        if (!a) continue;
        const auto words = tokenize(t).size();
        CHECK(a->size() >= 2);
        CHECK(a->size() <= words);
        CHECK(std::all_of(a->begin(), a->end(), [](unsigned char c) { return !std::islower(c); }));
    }
}

TEST_CASE("statute catalog") {
    const auto cat = small_catalog();
    CHECK(cat.size() == 4);
    const auto* irpa = cat.find(kIrpa);
    REQUIRE(irpa != nullptr);
    CHECK(irpa->cleaned_title == "Immigration and Refugee Protection Act");
    CHECK(irpa->acronym == std::optional<std::string>("IRPA"));
    CHECK(cat.title_index().at("immigration and refugee protection act") == kIrpa);
    for (const auto& [acr, ids] : cat.acronym_index()) {
        for (const auto& id : ids) CHECK(cat.find(id) != nullptr);
    }

    SUBCASE("duplicates merge") {
        const auto merged = StatuteCatalog::from_titles({"Federal Courts Act", "Federal Courts Act (R.S.C., 1985)"});
        CHECK(merged.size() == 1);
        CHECK(merged.titles()[0].raw_title == "Federal Courts Act");
    }
    SUBCASE("raw_titles rebuilds the catalog") {
        const auto again = StatuteCatalog::from_titles(cat.raw_titles());
        CHECK(again.size() == cat.size());
        CHECK(again.title_index() == cat.title_index());
    }
    SUBCASE("files") {
        testing::TempDir dir("titles");
        testing::write_file(dir / "t.txt", "Immigration and Refugee Protection Act\n\nFederal Courts Act\n");
        const auto loaded = load_statute_titles(dir / "t.txt");
        CHECK(loaded.size() == 2);
        CHECK(loaded.find(kIrpa)->acronym == std::optional<std::string>("IRPA"));
        testing::write_file(dir / "empty.txt", "");
        CHECK(load_statute_titles(dir / "empty.txt").empty());
        CHECK_THROWS_AS(load_statute_titles(dir / "missing.txt"), IoError);
    }
}

TEST_CASE("detect_statute_mentions") {
    const auto cat = small_catalog();
    CHECK(ids_of(detect_statute_mentions("under the Immigration and Refugee Protection Act", cat)) ==
          std::vector<std::string>{kIrpa});
    CHECK(ids_of(detect_statute_mentions("IRPA s. 96", cat)) == std::vector<std::string>{kIrpa});
    CHECK(detect_statute_mentions("the irpa", cat).empty());
    CHECK(detect_statute_mentions("IRPAX and XIRPA", cat).empty());

    SUBCASE("title match is case-insensitive and spans the title") {
        const std::string text = "see the FEDERAL COURTS ACT now";
        const auto m = detect_statute_mentions(text, cat);
        REQUIRE(m.size() == 1);
        CHECK(m[0].statute_id == kFca);
        CHECK(text.substr(m[0].span.begin, m[0].span.end - m[0].span.begin) == "FEDERAL COURTS ACT");
    }
    SUBCASE("shared acronym yields one mention per statute") {
        const auto shared = StatuteCatalog::from_titles({"Canada Act", "Citizenship Act"});
        const auto m = detect_statute_mentions("the CA applies", shared);
        CHECK(m.size() == 2);
        CHECK(ids_of(m) == std::vector<std::string>{"canada_act", "citizenship_act"});
    }
    SUBCASE("longest title wins an overlap") {
        const auto nested = StatuteCatalog::from_titles({"Courts Act", "Federal Courts Act"});
        CHECK(ids_of(detect_statute_mentions("the Federal Courts Act", nested)) ==
              std::vector<std::string>{"federal_courts_act"});
    }
}

TEST_CASE("detect_section_numbers") {
    CHECK(sections_of(detect_section_numbers("pursuant to section 18.1(4) of")) == std::vector<std::string>{"18.1(4)"});
    CHECK(detect_section_numbers("in 1985 the applicant").empty());
    CHECK(sections_of(detect_section_numbers("ss. 96 and 97")) == std::vector<std::string>{"96", "97"});
    CHECK(sections_of(detect_section_numbers("Sections 3, 4 or 5(1)(A)")) ==
          std::vector<std::string>{"3", "4", "5(1)(a)"});
    CHECK(sections_of(detect_section_numbers("subsection 72(1) and 74")) == std::vector<std::string>{"72(1)"});
    CHECK(sections_of(detect_section_numbers("Under s. 7, and 2010")) == std::vector<std::string>{"7"});
    CHECK(detect_section_numbers("the crossection 5").empty());

    const std::string text = "see s. 96 here";
    const auto m = detect_section_numbers(text);
    REQUIRE(m.size() == 1);
    CHECK(text.substr(m[0].span.begin, m[0].span.end - m[0].span.begin) == "96");
}

TEST_CASE("map_sections_to_statutes") {
    const auto cat = small_catalog();

    SUBCASE("majority co-occurrence wins") {
        const auto c = make_case("X", join_passages({"Under section 96 of the IRPA the claim was heard.",
                                                     "The Immigration and Refugee Protection Act, s. 96, applies.",
                                                     "IRPA section 96 again.",
                                                     "The Federal Courts Act and section 96 were argued.",
                                                     "Only section 96 here.", "Nothing cited."}));
        const auto ann = map_sections_to_statutes(c, cat);
        CHECK(ann.refs.size() == 5);
        for (std::size_t p = 0; p < 5; ++p) {
            CHECK(ann.refs_for({"X", p}) == std::vector<StatuteSectionRef>{{kIrpa, "96"}});
        }
        CHECK(ann.refs_for({"X", 5}).empty());
    }
    SUBCASE("no statute mention") {
        const auto c = make_case("Y", "The claim under section 96 failed.");
        const auto ann = map_sections_to_statutes(c, cat);
        CHECK(ann.refs_for({"Y", 0}) == std::vector<StatuteSectionRef>{{"UNKNOWN", "96"}});
    }
    SUBCASE("tie goes to the smaller id") {
        const auto c = make_case("Z", join_passages({"IRPA s. 5", "IRPA section 5", "Federal Courts Act s. 5",
                                                     "FCA section 5"}));
        const auto ann = map_sections_to_statutes(c, cat);
        REQUIRE(kFca < kIrpa);
        for (std::size_t p = 0; p < 4; ++p) CHECK(ann.refs_for({"Z", p}) == std::vector<StatuteSectionRef>{{kFca, "5"}});
    }
    SUBCASE("distinct sections in first-occurrence order") {
        const auto c = make_case("W", "IRPA ss. 97 and 96, then s. 97 again");
        CHECK(map_sections_to_statutes(c, cat).refs_for({"W", 0}) ==
              std::vector<StatuteSectionRef>{{kIrpa, "97"}, {kIrpa, "96"}});
    }
    SUBCASE("invariant under passage reordering") {
        std::vector<std::string> parts{"IRPA s. 5", "IRPA section 5 and s. 12", "Federal Courts Act s. 5",
                                       "FCA section 12", "Income Tax Act section 12", "ITA s. 12", "plain s. 40"};
        std::mt19937_64 rng(3);
        const auto reference = map_sections_to_statutes(make_case("R", join_passages(parts)), cat);
        auto by_text = [&](const std::vector<std::string>& order, const PassageAnnotations& a) {
            std::map<std::string, std::vector<StatuteSectionRef>> m;
            for (std::size_t i = 0; i < order.size(); ++i) m[order[i]] = a.refs_for({"R", i});
            return m;
        };
        const auto expected = by_text(parts, reference);
        for (int iter = 0; iter < 20; ++iter) {
            std::shuffle(parts.begin(), parts.end(), rng);
            CHECK(by_text(parts, map_sections_to_statutes(make_case("R", join_passages(parts)), cat)) == expected);
        }
    }
}

TEST_CASE("annotate_collection") {
    const auto cat = small_catalog();
    const auto col = testing::make_collection({{"a", "IRPA s. 96\n\nnothing"},
                                               {"b", "section 12 of the Federal Courts Act"},
                                               {"c", "no cues at 1985"}});

    SUBCASE("union of per-case results") {
        const auto all = annotate_collection(col, cat, Execution::serial);
        PassageAnnotations manual;
        for (const auto& [id, c] : col.cases) manual.merge(map_sections_to_statutes(c, cat));
        CHECK(all == manual);
        CHECK(annotate_collection(col, cat, Execution::parallel) == all);
        for (const auto& [key, refs] : all.refs) {
            const auto& text = col.at(key.case_id).passages.at(key.passage_index).text;
            for (const auto& r : refs) CHECK(text.find(r.section) != std::string::npos);
        }
    }
    SUBCASE("empty catalog leaves only UNKNOWN") {
        const auto ann = annotate_collection(col, StatuteCatalog{});
        CHECK(ann.refs.size() == 2);
        for (const auto& [key, refs] : ann.refs) {
            for (const auto& r : refs) CHECK(r.statute_id == "UNKNOWN");
        }
    }
    SUBCASE("no cues") {
        CHECK(annotate_collection(testing::make_collection({{"c", "no cues at 1985"}}), cat).empty());
    }
    SUBCASE("annotation file round trip") {
        testing::TempDir dir("ann");
        const auto ann = annotate_collection(col, cat);
        save_annotations(ann, dir / "a.tsv");
        CHECK(load_annotations(dir / "a.tsv").refs == ann.refs);
        testing::write_file(dir / "bad.tsv", "a\t0\tonly-three\n");
        CHECK_THROWS_AS(load_annotations(dir / "bad.tsv"), ValidationError);
    }
}

TEST_CASE("statute term encoding") {
    CHECK(StatuteSectionRef{"IRPA", "96"}.term() == "irpa#96");
    CHECK(statute_slug("Immigration and Refugee Protection Act") == kIrpa);
}
