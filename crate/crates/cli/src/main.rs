fn main() {
    eprintln!("laxkit: command-line interface not yet wired up");
    std::process::exit(2);
}
