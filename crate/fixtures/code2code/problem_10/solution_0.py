def max_price(invoices):
    return max(invoice.price for invoice in invoices)
