fn main() {
    let code = ultraflat::parallel::pool().install(|| ultraflat::run(std::env::args_os()));
    std::process::exit(code);
}
