fn main() {
    let (code, text) = bicover::cli::run(std::env::args_os());
    print!("{text}");
    std::process::exit(code);
}
