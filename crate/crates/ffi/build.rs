use std::path::PathBuf;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR"));
    let out = dir.join("include").join("lazygibbs.h");
    std::fs::create_dir_all(out.parent().unwrap()).expect("create include/");
    let config = cbindgen::Config::from_file(dir.join("cbindgen.toml")).expect("read cbindgen.toml");
    cbindgen::Builder::new().with_crate(&dir).with_config(config).generate().expect("generate C header").write_to_file(out);
}
