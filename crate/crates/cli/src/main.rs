use nchopf_cli::commands::main_with;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (code, text) = main_with(&argv);
    println!("{text}");
    std::process::exit(code);
}
