use sqcc::sim::*;
fn main() {
    let p = ProtocolParams { loss_db: 3.0, seed: 7, ..ProtocolParams::default() };
    let rep = run_campaign(&p, 150_000).unwrap();
    let t = p.t();
    println!("T={t:.4} expect_cov={:.4}", t.sqrt() * p.v_mod);
    println!("cov_plus={:.4} cov_minus={:.4}", rep.cov_plus, rep.cov_minus);
    println!("var_s2p={:.4} expect={:.4}", rep.var_s2p, t*(5.0+(1.0-t)/t+0.01)+p.detection_noise_referred());
    println!("t_hat={:.4} xi_hat={:.4}", rep.t_hat, rep.xi_hat);
}
