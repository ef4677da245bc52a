#include <doctest.h>

#include <string>

#include "ferrodyn/constants.hpp"
#include "ferrodyn/materials.hpp"

using namespace ferrodyn;

TEST_CASE("effective density of states") {
    // 2 (m kT / 2 pi hbar^2)^{3/2} for the free electron mass at 300 K
    CHECK(effective_dos(constants::m_e, 300.0) == doctest::Approx(2.5094e25).epsilon(1e-4));
    const auto si = SemiconductorParams::silicon();
    CHECK(si.Nc == doctest::Approx(2.8165e25).epsilon(1e-4));
    CHECK(si.Nv == doctest::Approx(1.8294e25).epsilon(1e-4));
    CHECK(si.Ec == doctest::Approx(0.56 * constants::q_e));
    CHECK(si.Ev == doctest::Approx(-0.56 * constants::q_e));
    CHECK_NOTHROW(si.validate());
}

TEST_CASE("parameter validation") {
    FerroelectricParams fe;
    CHECK_NOTHROW(fe.validate());
    fe.alpha = 1.0;
    CHECK_THROWS_AS(fe.validate(), std::invalid_argument);
    fe = {};
    fe.g44 = -1.0;
    CHECK_THROWS_AS(fe.validate(), std::invalid_argument);
    auto sc = SemiconductorParams::silicon();
    sc.Ec = sc.Ev;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("MFIM stack layout") {
    auto g = create_grid(8, 8, 18, 0.5e-9, 0.5e-9, 0.5e-9);
    const DeviceStack st = build_stack({{Material::dielectric, 4e-9, 10.0}, {Material::ferroelectric, 5e-9, 24.0}}, g);
    CHECK(st.fe_k_lo() == 8);
    CHECK(st.fe_k_hi() == 18);
    CHECK(st.z_int_fe_de() == 8);
    CHECK(st.fe_thickness() == doctest::Approx(5e-9));
    REQUIRE(st.dielectric_below_fe() != nullptr);
    CHECK(st.dielectric_below_fe()->k_hi == 8);
    CHECK_FALSE(st.has_semiconductor());
    CHECK(st.material_at(7) == Material::dielectric);
    CHECK(st.material_at(8) == Material::ferroelectric);
    CHECK(st.eps_field()(3, 4, 2) == doctest::Approx(10.0 * constants::eps0));
    CHECK(st.eps_field()(3, 4, 12) == doctest::Approx(24.0 * constants::eps0));
    CHECK(st.mask(Material::ferroelectric)(0, 0, 8) == 1.0);
    CHECK(st.mask(Material::ferroelectric)(0, 0, 7) == 0.0);
    CHECK(st.eps_profile().size() == 18);
}

TEST_CASE("MFM stack has no interface") {
    auto g = create_grid(4, 4, 20, 0.5e-9, 0.5e-9, 0.5e-9);
    const DeviceStack st = build_stack({{Material::ferroelectric, 10e-9, 24.0}}, g);
    CHECK(st.z_int_fe_de() == -1);
    CHECK(st.dielectric_below_fe() == nullptr);
}

TEST_CASE("stack errors name the offending layer") {
    auto g = create_grid(4, 4, 18, 0.5e-9, 0.5e-9, 0.5e-9);
    try {
        build_stack({{Material::dielectric, 4.2e-9, 10.0}, {Material::ferroelectric, 4.8e-9, 24.0}}, g);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("thickness") != std::string::npos);
    }
    CHECK_THROWS_AS(build_stack({{Material::ferroelectric, 4.5e-9, 24.0}, {Material::ferroelectric, 4.5e-9, 24.0}}, g),
                    std::invalid_argument);
    auto g2 = create_grid(4, 4, 9, 0.5e-9, 0.5e-9, 0.5e-9);
    CHECK_THROWS_AS(build_stack({{Material::dielectric, 4e-9, 10.0}, {Material::ferroelectric, 0.5e-9, 24.0}}, g2),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_stack({{Material::dielectric, 4e-9, 10.0}}, g2), std::invalid_argument);
    // layers that do not fill the grid
    CHECK_THROWS_AS(build_stack({{Material::ferroelectric, 4e-9, 24.0}}, g2), std::invalid_argument);
}
