def highest_price(invoices):
    best = None
    for invoice in invoices:
        if best is None or invoice.price > best:
            best = invoice.price
    return best
