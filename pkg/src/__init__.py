# dapkit: donor-acceptor pair modeling toolkit
