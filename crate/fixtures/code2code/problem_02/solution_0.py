def total_price(songs):
    total = 0
    for song in songs:
        total += song.price
    return total
