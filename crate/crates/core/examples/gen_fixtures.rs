//! Regenerate the fixture corpus shipped under fixtures/.
//!
//!     cargo run -p dasmine --example gen_fixtures -- [DIR]

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "fixtures".to_string());
    let fixtures = dasmine::synth::fixture_corpus(7);
    fixtures.write_to(std::path::Path::new(&dir)).expect("write fixtures");
    println!("wrote {} files under {dir}", fixtures.files.len());
}
