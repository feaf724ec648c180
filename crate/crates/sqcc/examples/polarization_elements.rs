//! Tour of the optical elements: Jones matrices, Mueller conversion, and
//! what each element does to a Stokes vector.
//!
//! ```bash
//! cargo run --release --example polarization_elements
//! ```

use sqcc::mueller::{jones_to_mueller, Element, PbsPort, StokesVector};

fn show(label: &str, element: Element, input: StokesVector) {
    let m = element.mueller().expect("valid element");
    let out = m.apply(&input);
    println!(
        "{label:<24} {:>6.3} {:>6.3} {:>6.3} {:>6.3}  ->  {:>6.3} {:>6.3} {:>6.3} {:>6.3}",
        input.s0(),
        input.s1(),
        input.s2(),
        input.s3(),
        out.s0(),
        out.s1(),
        out.s2(),
        out.s3()
    );
}

fn main() {
    let h = StokesVector::horizontal();
    let d = StokesVector::new(1.0, 0.0, 1.0, 0.0);

    println!("element                  S_in (S0 S1 S2 S3)          ->  S_out");
    show("half-wave plate 22.5d", Element::Hwp(std::f64::consts::FRAC_PI_8), h);
    show("half-wave plate 0d", Element::Hwp(0.0), d);
    show("quarter-wave plate 45d", Element::Qwp(std::f64::consts::FRAC_PI_4), d);
    show("EOM retarder pi/2", Element::Eom(std::f64::consts::FRAC_PI_2), d);
    show("MOM rotator pi/4", Element::Mom(std::f64::consts::FRAC_PI_4), h);
    show("Pockels cell (active)", Element::Pockels(true), h);
    show("beam splitter tau=0.5", Element::Bs(0.5), h);
    show("PBS, H port", Element::PbsPort(PbsPort::H), d);

    // unitarity and intensity conservation for the lossless elements
    println!("\nlossless elements: unitarity defect of the Jones matrix");
    for e in [
        Element::Hwp(0.3),
        Element::Qwp(1.2),
        Element::Eom(0.8),
        Element::Mom(-0.5),
        Element::Pockels(true),
    ] {
        let j = e.jones().unwrap();
        println!("  {e:?}: {:.2e}", j.unitarity_defect());
    }

    // composition homomorphism: Mueller of product = product of Muellers
    let j1 = Element::Eom(0.7).jones().unwrap();
    let j2 = Element::Hwp(0.4).jones().unwrap();
    let lhs = jones_to_mueller(&j2.after(&j1)).unwrap();
    let rhs = jones_to_mueller(&j2).unwrap().after(&jones_to_mueller(&j1).unwrap());
    println!(
        "\ncomposition homomorphism residual: {:.2e}",
        (lhs.0 - rhs.0).amax()
    );
}
