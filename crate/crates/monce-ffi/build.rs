use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml is valid");
    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(crate_dir.join("include/monce.h"));
        }
        // Expansion can fail while rust-analyzer or a doc build probes the
        // crate mid-edit; keep the last good header instead of failing.
        Err(cbindgen::Error::ParseSyntaxError { .. }) => {}
        Err(e) => panic!("failed to generate C header: {e}"),
    }
}
