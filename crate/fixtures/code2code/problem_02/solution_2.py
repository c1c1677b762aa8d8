def accumulate_price(items):
    result = 0
    index = 0
    while index < len(items):
        result = result + items[index].price
        index += 1
    return result
