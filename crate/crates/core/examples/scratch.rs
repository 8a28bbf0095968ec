use casimir_core::angular::FieldKind;
use casimir_core::energy::*;
use casimir_core::tmatrix::{MirrorFlavor, Scatterer};

fn main() {
    let quad = QuadratureSpec::new(64);
    for a in [2.5, 3.0, 4.0, 10.0, 16.0] {
        let cfg = Configuration::two_body(
            FieldKind::Scalar,
            Scatterer::ScalarDirichletSphere { radius: 1.0 },
            Scatterer::ScalarDirichletSphere { radius: 1.0 },
            a,
        )
        .unwrap();
        let res = casimir_energy(&cfg, 10, &quad).unwrap();
        println!("scalar a/R={a}: E = {:.8e}", res.energy);
    }
    for flavor in [MirrorFlavor::ScalarDirichlet, MirrorFlavor::ScalarNeumann] {
        let cfg = Configuration::sphere_mirror(
            FieldKind::Scalar,
            Scatterer::ScalarDirichletSphere { radius: 1.0 },
            flavor,
            4.0,
        )
        .unwrap();
        let res = mirror_energy(&cfg, 10, &quad).unwrap();
        println!("mirror {flavor:?} a/R=4: E = {:.8e}", res.energy);
    }
    // unequal radii: R1=1, R2=2, a=5 (paper units hbar c / R0)
    let cfg = Configuration::two_body(
        FieldKind::Scalar,
        Scatterer::ScalarDirichletSphere { radius: 1.0 },
        Scatterer::ScalarDirichletSphere { radius: 2.0 },
        5.0,
    )
    .unwrap()
    .with_r_ref(1.0);
    let res = casimir_energy(&cfg, 10, &quad).unwrap();
    println!("unequal a=5R0: E = {:.8e}", res.energy);
    // dielectric eps=100: R1=1, R2=2, a=4
    let cfg = Configuration::two_body(
        FieldKind::Scalar,
        Scatterer::ScalarDielectricSphere { radius: 1.0, epsilon: 100.0 },
        Scatterer::ScalarDielectricSphere { radius: 2.0, epsilon: 100.0 },
        4.0,
    )
    .unwrap()
    .with_r_ref(1.0);
    let res = casimir_energy(&cfg, 10, &quad).unwrap();
    println!("dielectric eps=100 a=4R0: E = {:.8e}", res.energy);
    // EM conducting spheres a=4, j0=10
    let cfg = Configuration::two_body(
        FieldKind::Em,
        Scatterer::EmConductingSphere { radius: 1.0 },
        Scatterer::EmConductingSphere { radius: 1.0 },
        4.0,
    )
    .unwrap();
    let res = casimir_energy(&cfg, 10, &quad).unwrap();
    println!("em a=4: E_s = {:.6e}", res.energy);
    for flavor in [MirrorFlavor::EmConducting, MirrorFlavor::EmPermeable] {
        let cfg = Configuration::sphere_mirror(
            FieldKind::Em,
            Scatterer::EmConductingSphere { radius: 1.0 },
            flavor,
            4.0,
        )
        .unwrap();
        let res = mirror_energy(&cfg, 10, &quad).unwrap();
        println!("em mirror {flavor:?} a=4: E = {:.6e}", res.energy);
    }
}
