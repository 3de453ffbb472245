#include <gtest/gtest.h>

#include "chefs/catalog.hpp"
#include "chefs/error.hpp"
#include "test_util.hpp"

namespace chefs {
namespace {

TEST(OntologyPath, SplitsAndTrims) {
    const auto p = parse_param_path("chemical contaminants:: metals ::lead");
    ASSERT_EQ(p.depth(), 3u);
    EXPECT_EQ(p.segments()[1], "metals");
    EXPECT_EQ(p.joined(), "chemical contaminants::metals::lead");
}

TEST(OntologyPath, RejectsEmptySegments) {
    EXPECT_THROW(parse_param_path(""), Error);
    EXPECT_THROW(parse_param_path("a::::b"), Error);
    EXPECT_THROW(parse_param_path("a::  ::b"), Error);
    try {
        parse_param_path("a::");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedPath);
    }
}

TEST(OntologyPath, GroupAtLevelAndTruncation) {
    const auto p = parse_param_path("pesticides::insecticides::organophosphates::chlorpyrifos");
    EXPECT_EQ(ontology_group(p, 1).name, "pesticides");
    EXPECT_EQ(ontology_group(p, 3).name, "organophosphates");
    EXPECT_FALSE(ontology_group(p, 4).truncated);
    const auto deep = ontology_group(p, 6);
    EXPECT_EQ(deep.name, "chlorpyrifos");
    EXPECT_TRUE(deep.truncated);
}

TEST(Catalogue, ParseRejectsDuplicatesWithinEra) {
    const std::string ok = "term_id,full_name,era\nA,x::a,SSD1\nA,x::a2,SSD2\nB,x::b,\n";
    EXPECT_EQ(parse_catalogue(ok, CatalogueKind::MatrixFoodex, "t").size(), 3u);
    const std::string dup = "term_id,full_name,era\nA,x::a,SSD1\nA,x::b,SSD1\n";
    try {
        parse_catalogue(dup, CatalogueKind::MatrixFoodex, "t");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateTerm);
        EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
    }
}

TEST(Catalogue, ParseRejectsMalformedRows) {
    EXPECT_THROW(parse_catalogue("term_id,full_name,era\nA,x::a\n", CatalogueKind::Param, "t"), Error);
    EXPECT_THROW(parse_catalogue("term_id,full_name,era\n,x::a,\n", CatalogueKind::Param, "t"), Error);
    EXPECT_THROW(parse_catalogue("term_id,full_name,era\nA,x::a,SSD9\n", CatalogueKind::Param, "t"), Error);
}

TEST(Catalogue, EraLookupFallsBack) {
    CatalogueIndex idx;
    idx.add(parse_catalogue("term_id,full_name,era\nP,m::old,SSD1\nQ,m::any,\n", CatalogueKind::MatrixFoodex, "a"));
    idx.add(parse_catalogue("term_id,full_name,era\nP,m::new,SSD2\n", CatalogueKind::MatrixFoodex2, "b"));
    EXPECT_EQ(idx.product_full_name("P", Era::SSD1), "m::old");
    EXPECT_EQ(idx.product_full_name("P", Era::SSD2), "m::new");
    EXPECT_EQ(idx.product_full_name("Q", Era::SSD2), "m::any");
    EXPECT_FALSE(idx.product_full_name("Z", Era::SSD2));
}

TEST(Catalogue, BuiltinLoads) {
    const auto idx = CatalogueIndex::builtin();
    EXPECT_GT(idx.size(), 50u);
}

struct Fixture {
    const char* name;
    const char* category;
};

// One product per category of the grouping table, plus the worked eggs example.
const Fixture kFixtures[] = {
    {"mtx::all lists::food::eggs and egg products::whole eggs", "Eggs and Egg products"},
    {"mtx::all lists::food::alcoholic beverages::beer", "Alcoholic and Nonalcoholic Beverages"},
    {"mtx::all lists::food::animal fresh meat::bovine fresh meat", "Animal Meat and Tissues"},
    {"matrix::honey and other apicultural products", "Apiculture Products"},
    {"mtx::all lists::food::bakery products::bread", "Bakery and Starchy Products"},
    {"matrix::cereals::rice", "Cereals and Grains"},
    {"mtx::composite dishes::pizza", "Composites and Mixed Foods"},
    {"matrix::feed::compound feed", "Feed"},
    {"mtx::all lists::food::berries and small fruits::strawberries", "Fruits"},
    {"mtx::all lists::food::meat and dairy imitates::soy drink", "Imitations and Substitutes"},
    {"mtx::all lists::food::food for infants and young children::infant cereals", "Infant and Special Diet Foods"},
    {"mtx::all lists::food::leaf vegetables, herbs and edible flowers::lettuces", "Leafy Vegetables, Herbs and Flowers"},
    {"matrix::pulses (dry)::lentils", "Legumes and Pulses"},
    {"mtx::all lists::food::fungi, mosses and lichens::cultivated mushrooms",
     "Microorganisms, Algae, Fungi, Moss, Lichen and Derived Materials"},
    {"mtx::milk::cow milk", "Milk and Dairy Products"},
    {"mtx::all lists::food::tree nuts::pistachios", "Nuts and Seeds"},
    {"mtx::all lists::food::smoked fish::smoked salmon", "Seafood and Fish Products"},
    {"mtx::all lists::food::seasoning, sauces and condiments::ketchup", "Spices, Condiments and Additives"},
    {"mtx::all lists::food::sugars and similar::white sugar", "Sugars and Sweeteners"},
    {"mtx::all lists::food::bulb vegetables::onions", "Vegetables (Non-Leafy)"},
    {"mtx::all lists::food::animal and vegetable fats and oils and primary derivatives thereof::olive oil",
     "animal and vegetable fats and oils"},
};

TEST(Grouping, BuiltinFixtures) {
    const auto& dict = GroupingDictionary::builtin();
    for (const auto& f : kFixtures)
        EXPECT_EQ(dict.assign(f.name, HazardCategory::PesticideResidues), f.category) << f.name;
}

TEST(Grouping, KeywordsRespectWordBoundaries) {
    const auto& dict = GroupingDictionary::builtin();
    // "oat" precedes "milk" in rule order but must not fire inside "goat"
    EXPECT_EQ(dict.assign("matrix::goat milk", HazardCategory::ChemicalContaminants), "Milk and Dairy Products");
    EXPECT_EQ(dict.assign("matrix::rolled oat flakes", HazardCategory::ChemicalContaminants), "Cereals and Grains");
}

TEST(Grouping, WholeSegmentBeatsEarlierKeyword) {
    const auto dict = GroupingDictionary::parse(
        "order,pattern,scope,category\n10,rice,ALL,Cereals\n20,rice cakes,ALL,Snacks\n", "t");
    EXPECT_EQ(dict.assign("m::rice cakes", HazardCategory::ChemicalContaminants), "Snacks");
    EXPECT_EQ(dict.assign("m::brown rice", HazardCategory::ChemicalContaminants), "Cereals");
}

TEST(Grouping, OrderNotFilePositionDecides) {
    const auto dict = GroupingDictionary::parse(
        "order,pattern,scope,category\n20,apple,ALL,B\n10,apple,ALL,A\n", "t");
    EXPECT_EQ(dict.assign("x::apple", HazardCategory::ChemicalContaminants), "A");
}

TEST(Grouping, ScopeRestrictsRules) {
    const auto dict = GroupingDictionary::parse(
        "order,pattern,scope,category\n10,honey,VMPR,Vet\n20,honey,ALL,Any\n", "t");
    EXPECT_EQ(dict.assign("m::honey", HazardCategory::VMPR), "Vet");
    EXPECT_EQ(dict.assign("m::honey", HazardCategory::PesticideResidues), "Any");
}

TEST(Grouping, UnmatchedGoesToOthersAndCategoriesAreListed) {
    const auto dict = GroupingDictionary::parse(
        "order,pattern,scope,category\n10,apple,ALL,Fruit\n20,pear,ALL,fruit\n", "t");
    EXPECT_EQ(dict.assign("m::stone", HazardCategory::ChemicalContaminants), "Others");
    EXPECT_EQ(dict.assign("m::pear", HazardCategory::ChemicalContaminants), "Fruit");
    EXPECT_EQ(dict.categories(), (std::vector<std::string>{"Fruit", "Others"}));
}

TEST(Grouping, CaseAndWhitespaceInsensitive) {
    const auto& dict = GroupingDictionary::builtin();
    EXPECT_EQ(dict.assign("MTX ::  Whole   Eggs ", HazardCategory::ChemicalContaminants), "Eggs and Egg products");
}

TEST(Grouping, RejectsBadTable) {
    EXPECT_THROW(GroupingDictionary::parse("order,pattern,scope,category\nx,apple,ALL,F\n", "t"), Error);
    EXPECT_THROW(GroupingDictionary::parse("order,pattern,scope,category\n1,apple,NOPE,F\n", "t"), Error);
}

}  // namespace
}  // namespace chefs
